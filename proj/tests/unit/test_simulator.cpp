#include <doctest.h>

#include <cmath>
#include <numeric>

#include "aoirelay/analytics.hpp"
#include "aoirelay/simulator.hpp"

using namespace aoirelay;

TEST_CASE("metrics accumulator basics") {
    MetricsAccumulator m(2, 4, 2);
    m.record_slot(AoiState(std::vector<Age>{1, 3}));
    m.record_slot(AoiState(std::vector<Age>{2, 4}));
    m.record_peak(1, 4);
    m.record_slot(AoiState(std::vector<Age>{3, 1}));
    m.record_slot(AoiState(std::vector<Age>{4, 2}));
    CHECK(m.slots() == 4);
    CHECK(m.ed_aaoi(0) == doctest::Approx(2.5));
    CHECK(m.ed_aaoi(1) == doctest::Approx(2.5));
    CHECK(m.aaoi() == doctest::Approx(2.5));
    CHECK(m.ed_paoi(1) == doctest::Approx(4.0));
    CHECK(std::isnan(m.ed_paoi(0)));
    CHECK(m.paoi() == doctest::Approx(4.0));
    CHECK(m.peaks() == 1);
    const auto& hist = m.total_histogram();
    CHECK(std::accumulate(hist.begin(), hist.end(), std::uint64_t{0}) == 4);
    // Sums 4, 6, 4, 6 -> network averages 2, 3, 2, 3.
    CHECK(m.empirical_ccdf(2.0) == doctest::Approx(0.5));
    CHECK(m.empirical_ccdf(1.0) == doctest::Approx(1.0));
    CHECK(m.empirical_ccdf(3.0) == doctest::Approx(0.0));
}

TEST_CASE("accumulators merge associatively") {
    auto make = [](Age shift) {
        MetricsAccumulator m(3, 10, 5);
        for (Age t = 0; t < 10; ++t) {
            m.record_slot(AoiState(std::vector<Age>{1 + t + shift, 2 + shift, 1 + (t % 3)}));
            if (t % 4 == 0) m.record_peak(t % 3, 5 + t);
        }
        return m;
    };
    auto a = make(0), b = make(1), c = make(2);
    auto left = a;
    left.merge(b);
    left.merge(c);
    auto right_inner = b;
    right_inner.merge(c);
    auto right = a;
    right.merge(right_inner);
    CHECK(left.aaoi() == right.aaoi());
    CHECK(left.paoi() == right.paoi());
    CHECK(left.aaoi_stderr() == right.aaoi_stderr());
    CHECK(left.total_histogram() == right.total_histogram());
    CHECK(left.slots() == 30);
}

TEST_CASE("a fresh delivery shows age 1 in the next slot") {
    NetworkConfig c;
    c.n_eds = 1;
    c.n_relays = 1;
    c.n_channels = 1;
    c.activation_prob = 1.0;
    c.erasure_p1 = {0.0};
    c.erasure_p2 = 0.0;
    c.horizon_slots = 50;
    c.warmup_slots = 0;
    Simulator sim(c, SchedulerKind::kImas);
    while (!sim.done()) {
        sim.step();
        CHECK(sim.ages()[0] == 1);
    }
    CHECK(sim.metrics().aaoi() == doctest::Approx(1.0));
    CHECK(sim.metrics().paoi() == doctest::Approx(1.0));
}

TEST_CASE("oracle tracks the bound at desk scale") {
    NetworkConfig c;
    c.horizon_slots = 300'000;
    Simulator sim(c, SchedulerKind::kOracle);
    sim.run();
    const double bound = analytics::aoi_bound({30, 0.1, 2, 5, 0.1}).aaoi;
    const auto& m = sim.metrics();
    CHECK(std::abs(m.aaoi() - bound) < 4 * m.aaoi_stderr() + 0.01 * bound);
    CHECK(std::abs(m.paoi() - bound) < 0.03 * bound);
    CHECK(m.aaoi() >= 1.0);
    CHECK(m.paoi() >= 1.0);
    const auto& hist = m.total_histogram();
    CHECK(std::accumulate(hist.begin(), hist.end(), std::uint64_t{0}) == c.measured_slots());
}

TEST_CASE("two halves of a long run agree") {
    NetworkConfig c;
    c.horizon_slots = 200'000;
    c.warmup_slots = 1000;
    c.seed = 77;
    Simulator sim(c, SchedulerKind::kImas);
    MetricsAccumulator first(c.n_eds, 99'500, 10), second(c.n_eds, 99'500, 10);
    while (!sim.done()) {
        const auto rec = sim.step();
        if (rec.slot < c.warmup_slots) continue;
        (rec.slot < 100'500 ? first : second).record_slot(rec.ages_before);
    }
    const double se = std::hypot(first.aaoi_stderr(), second.aaoi_stderr());
    CHECK(std::abs(first.aaoi() - second.aaoi()) < 4 * se);
}

TEST_CASE("warm-up slots are excluded") {
    NetworkConfig c;
    c.horizon_slots = 500;
    c.warmup_slots = 200;
    Simulator sim(c, SchedulerKind::kAbdr);
    sim.run();
    CHECK(sim.metrics().slots() == 300);
    CHECK(sim.counters().overhead_symbols == 300 * overhead_symbols(SchedulerKind::kAbdr, SymbolBudget::for_network(30, 5, 1), 5));
    CHECK_THROWS(sim.step());
}

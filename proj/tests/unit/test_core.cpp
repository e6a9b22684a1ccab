#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "aoirelay/config.hpp"
#include "aoirelay/rng.hpp"
#include "aoirelay/simulator.hpp"
#include "aoirelay/types.hpp"

using namespace aoirelay;

namespace {

std::string offending_field(const NetworkConfig& c) {
    try {
        c.validate();
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

} // namespace

TEST_CASE("config validation names the offending field") {
    NetworkConfig c;
    CHECK_NOTHROW(c.validate());
    c.activation_prob = 1.5;
    CHECK(offending_field(c) == "activation_prob");
    c = {};
    c.erasure_p2 = -0.1;
    CHECK(offending_field(c) == "erasure_p2");
    c = {};
    c.n_channels = 0;
    CHECK(offending_field(c) == "n_channels");
    c = {};
    c.n_relays = 0;
    CHECK(offending_field(c) == "n_relays");
    c = {};
    c.n_eds = 0;
    CHECK(offending_field(c) == "n_eds");
    c = {};
    c.warmup_slots = c.horizon_slots;
    CHECK(offending_field(c) == "warmup_slots");
    c = {};
    c.erasure_p1 = {0.1, 0.2};
    CHECK(offending_field(c) == "erasure_p1");
    c.erasure_p1.assign(c.n_eds, 0.2);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("buffered schedulers need a buffer") {
    NetworkConfig c;
    c.buffer_size = 0;
    CHECK_NOTHROW(c.validate_for(SchedulerKind::kImas));
    CHECK_THROWS_AS(c.validate_for(SchedulerKind::kBufferedImas), ConfigError);
    CHECK_THROWS_AS(c.validate_for(SchedulerKind::kBufferedAbdr), ConfigError);
}

TEST_CASE("scheduler names round-trip") {
    for (auto k : {SchedulerKind::kAlohaForward, SchedulerKind::kOracle, SchedulerKind::kMam, SchedulerKind::kImas,
                   SchedulerKind::kBufferedImas, SchedulerKind::kAbdr, SchedulerKind::kBufferedAbdr}) {
        CHECK(parse_scheduler_kind(to_string(k)) == k);
    }
    CHECK_THROWS_AS(parse_scheduler_kind("B-MAM"), ConfigError);
}

TEST_CASE("rng streams are deterministic per tuple") {
    auto a = rng_stream(7, Entity::kEd, 3, 11);
    auto b = rng_stream(7, Entity::kEd, 3, 11);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    auto c = rng_stream(7, Entity::kEd, 3, 11);
    auto d = rng_stream(8, Entity::kEd, 3, 11);
    int equal = 0;
    for (int i = 0; i < 100; ++i) equal += c.next_u64() == d.next_u64();
    CHECK(equal == 0);

    auto e = rng_stream(7, Entity::kRelay, 3, 11);
    auto f = rng_stream(7, Entity::kEd, 3, 11);
    CHECK(e.next_u64() != f.next_u64());
}

TEST_CASE("rng uniform draws look uniform") {
    auto r = rng_stream(1, Entity::kAp, 0, 0);
    constexpr int kDraws = 200000;
    std::array<int, 10> bins{};
    double sum = 0.0;
    for (int i = 0; i < kDraws; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        ++bins[static_cast<std::size_t>(u * 10)];
    }
    CHECK(sum / kDraws == doctest::Approx(0.5).epsilon(0.01));
    for (int b : bins) CHECK(b == doctest::Approx(kDraws / 10.0).epsilon(0.03));
    for (int i = 0; i < 1000; ++i) CHECK(r.uniform_index(3) < 3);
}

TEST_CASE("advance_ages increments every age") {
    CHECK(advance_ages(AoiState(std::vector<Age>{1, 1})).ages()[0] == 2);
    AoiState s(std::vector<Age>{3, 7});
    CHECK(s.max_age() == 7);
    s = advance_ages(s);
    CHECK(s[0] == 4);
    CHECK(s[1] == 8);
    CHECK(s.max_age() == 8);
    AoiState one(std::vector<Age>{1});
    for (int i = 0; i < 5; ++i) one = advance_ages(one);
    CHECK(one[0] == 6);
}

TEST_CASE("apply_deliveries resets from the delivered packet's age") {
    AoiState s(std::vector<Age>{5, 5, 5});
    const Slot t = 10;
    SUBCASE("fresh packet restarts at 1") {
        std::vector<Delivery> d{{Packet{0, t, 0, 0}, 0}};
        const auto next = apply_deliveries(s, d, t);
        CHECK(next[0] == 1);
        CHECK(next[1] == 6);
        CHECK(next[2] == 6);
    }
    SUBCASE("three-slot-old packet restarts at 4") {
        std::vector<Delivery> d{{Packet{1, t - 3, 0, 0}, 3}};
        CHECK(apply_deliveries(s, d, t)[1] == 4);
    }
    SUBCASE("no deliveries is a plain advance") {
        CHECK(apply_deliveries(s, {}, t) == advance_ages(s));
    }
    SUBCASE("freshest of several deliveries wins") {
        std::vector<Delivery> d{{Packet{2, t - 2, 0, 0}, 2}, {Packet{2, t, 1, 1}, 0}};
        CHECK(apply_deliveries(s, d, t)[2] == 1);
    }
    SUBCASE("stale delivery never raises the age") {
        std::vector<Delivery> d{{Packet{0, t - 8, 0, 0}, 8}};
        CHECK(apply_deliveries(s, d, t)[0] == 6);
    }
    SUBCASE("future packets and wrong ages are rejected") {
        std::vector<Delivery> future{{Packet{0, t + 1, 0, 0}, 0}};
        CHECK_THROWS(apply_deliveries(s, future, t));
        std::vector<Delivery> wrong{{Packet{0, t - 1, 0, 0}, 3}};
        CHECK_THROWS(apply_deliveries(s, wrong, t));
    }
}

TEST_CASE("plan_violation catches relay reuse and duplicate identities") {
    TransmissionPlan plan(2);
    plan.channels[0].push_back({0, Packet{1, 5, 0, 0}});
    plan.channels[1].push_back({1, Packet{2, 5, 1, 1}});
    CHECK_FALSE(plan_violation(plan).has_value());

    auto twice = plan;
    twice.channels[1][0] = {0, Packet{2, 5, 1, 0}};
    CHECK(plan_violation(twice).has_value());
    CHECK_FALSE(plan_violation(twice, true).has_value());

    auto dup = plan;
    dup.channels[1][0] = {1, Packet{1, 5, 1, 1}};
    CHECK(plan_violation(dup).has_value());

    auto holder = plan;
    holder.channels[0][0].relay = 1;
    holder.channels[1].clear();
    CHECK(plan_violation(holder).has_value());
}

TEST_CASE("resolve_phase2 delivers lone arrivals only") {
    ConnectivityMatrix h(2, 3);
    h.set(1, 2, false);
    TransmissionPlan plan(2);
    plan.channels[0].push_back({0, Packet{0, 4, 0, 0}});
    plan.channels[0].push_back({1, Packet{1, 4, 0, 1}});
    plan.channels[1].push_back({2, Packet{2, 4, 1, 2}});
    auto out = resolve_phase2(plan, h, 6);
    CHECK(out.delivered.empty());
    CHECK(out.ap_collisions == 1);
    CHECK(out.erased_tx == 1);

    h.set(0, 1, false);
    h.set(1, 2, true);
    out = resolve_phase2(plan, h, 6);
    REQUIRE(out.delivered.size() == 2);
    CHECK(out.delivered[0].packet.source_ed == 0);
    CHECK(out.delivered[0].age == 2);
    CHECK(out.ap_collisions == 0);
}

TEST_CASE("oracle plans bypass H") {
    TransmissionPlan plan;
    plan.ideal_deliveries = {Packet{0, 3, 0, 0}, Packet{1, 3, 1, 1}};
    const auto out = resolve_phase2(plan, ConnectivityMatrix(2, 2, false), 3);
    CHECK(out.delivered.size() == 2);
}

TEST_CASE("connectivity draws follow 1 - eps2") {
    std::uint64_t on = 0;
    constexpr Slot kSlots = 20000;
    for (Slot t = 0; t < kSlots; ++t) {
        const auto h = ConnectivityMatrix::draw(2, 5, 0.3, 9, t);
        for (std::size_t f = 0; f < 2; ++f) {
            for (std::size_t k = 0; k < 5; ++k) on += h.connected(f, k);
        }
    }
    const double n = kSlots * 10.0;
    const double rate = static_cast<double>(on) / n;
    CHECK(std::abs(rate - 0.7) < 3 * std::sqrt(0.21 / n));
    CHECK(ConnectivityMatrix::draw(2, 5, 0.3, 9, 17) == ConnectivityMatrix::draw(2, 5, 0.3, 9, 17));
}

TEST_CASE("every scheduler sees the same phase-1 and H realization") {
    NetworkConfig c;
    c.horizon_slots = 2000;
    c.warmup_slots = 10;
    Simulator a(c, SchedulerKind::kImas);
    Simulator b(c, SchedulerKind::kBufferedAbdr);
    while (!a.done()) {
        const auto ra = a.step();
        const auto rb = b.step();
        REQUIRE(ra.captures.entries == rb.captures.entries);
        REQUIRE(ra.h == rb.h);
    }
}

TEST_CASE("ages follow a sawtooth") {
    NetworkConfig c;
    c.horizon_slots = 5000;
    c.warmup_slots = 1;
    Simulator sim(c, SchedulerKind::kImas);
    AoiState prev = sim.ages();
    while (!sim.done()) {
        const auto rec = sim.step();
        std::set<std::size_t> reset;
        for (const auto& d : rec.outcome.delivered) reset.insert(d.packet.source_ed);
        for (std::size_t i = 0; i < c.n_eds; ++i) {
            REQUIRE(sim.ages()[i] >= 1);
            if (!reset.count(i)) REQUIRE(sim.ages()[i] == prev[i] + 1);
            if (reset.count(i)) REQUIRE(sim.ages()[i] <= prev[i]);
        }
        REQUIRE(sim.ages().max_age() == *std::max_element(sim.ages().ages().begin(), sim.ages().ages().end()));
        prev = sim.ages();
    }
}

TEST_CASE("replays reproduce the outcome stream") {
    NetworkConfig c;
    c.horizon_slots = 3000;
    c.seed = 42;
    Simulator a(c, SchedulerKind::kAbdr);
    Simulator b(c, SchedulerKind::kAbdr);
    while (!a.done()) {
        const auto ra = a.step();
        const auto rb = b.step();
        REQUIRE(ra.plan.channels == rb.plan.channels);
        REQUIRE(ra.outcome.delivered.size() == rb.outcome.delivered.size());
    }
    CHECK(a.metrics().aaoi() == b.metrics().aaoi());
}

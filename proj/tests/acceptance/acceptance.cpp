// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance                 run all criteria
//   acceptance --criterion 4   run one

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aoirelay/analytics.hpp"
#include "aoirelay/experiment.hpp"
#include "aoirelay/matching.hpp"
#include "aoirelay/schedulers.hpp"
#include "aoirelay/signaling.hpp"
#include "aoirelay/simulator.hpp"
#include "oracles.hpp"

using namespace aoirelay;

namespace {

constexpr double kZ95OneSided = 1.645;
constexpr double kZ95TwoSided = 1.96;
constexpr double kTargetPStar = 0.0917;

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "[x] ") + what;
    }
};

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt2(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const RunResult& row(const ResultTable& t, std::size_t point, SchedulerKind kind) {
    for (const auto& r : t.rows) {
        if (r.point == point && r.scheduler == kind && r.replication == 0) return r;
    }
    throw std::out_of_range("missing row");
}

ExperimentSpec desk(const char* preset, std::uint64_t horizon) {
    auto s = figure_preset(preset);
    s.base.horizon_slots = horizon;
    s.replications = 1;
    return s;
}

Verdict bound_bridge() {
    Verdict v;
    NetworkConfig c;
    c.horizon_slots = 1'000'000;
    const auto t0 = std::chrono::steady_clock::now();
    Simulator sim(c, SchedulerKind::kOracle);
    sim.run();
    const double elapsed = seconds_since(t0);
    const double bound = analytics::aoi_bound({30, 0.1, 2, 5, 0.1}).aaoi;
    const double ea = std::abs(sim.metrics().aaoi() - bound) / bound;
    const double ep = std::abs(sim.metrics().paoi() - bound) / bound;
    v.require(ea < 0.02, fmt2("AAoI %.4f vs bound %.4f", sim.metrics().aaoi(), bound) + fmt(" (%.2f%%)", 100 * ea));
    v.require(ep < 0.02, fmt("PAoI %.4f", sim.metrics().paoi()) + fmt(" (%.2f%%)", 100 * ep));
    v.require(elapsed < 60.0, fmt("%.1fs", elapsed));
    return v;
}

Verdict optimal_activation() {
    Verdict v;
    const auto opt = analytics::optimize_activation(30, 2, 5, 0.1);
    v.require(std::abs(opt.p_star - kTargetPStar) <= 0.001,
              fmt2("bound p* = %.5f (target 0.0917 +- 0.001, off by %.5f)", opt.p_star,
                   std::abs(opt.p_star - kTargetPStar)));

    const auto spec = desk("f5", 500'000);
    const auto table = run_experiment(spec, 0);
    const double step = 0.01;
    for (auto kind : spec.schedulers) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < spec.values.size(); ++i) {
            if (row(table, i, kind).metrics.aaoi() < row(table, best, kind).metrics.aaoi()) best = i;
        }
        const double p_min = spec.values[best];
        const bool near = std::abs(p_min - opt.p_star) <= step + 1e-12;
        v.require(near, std::string(to_string(kind)) + fmt(" argmin p=%.2f", p_min));
    }
    return v;
}

Verdict convolution_oracle() {
    Verdict v;
    double worst = 0.0;
    for (double pq : {0.01, 0.1, 0.5}) {
        for (std::size_t n = 1; n <= 5; ++n) {
            const auto ref = oracle::convolve_geometric(n, 50, pq);
            for (std::uint64_t d = 1; d <= 50; ++d) {
                const double got = analytics::convolved_pmf_closed(n, d, pq, 1.0);
                if (ref[d] == 0.0L) {
                    if (got != 0.0) worst = INFINITY;
                    continue;
                }
                worst = std::max(worst, static_cast<double>(std::abs(got - ref[d]) / ref[d]));
            }
        }
    }
    v.require(worst < 1e-12, fmt("max relative error %.3g", worst));
    return v;
}

Verdict theorem_fidelity() {
    Verdict v;
    NetworkConfig c;
    c.erasure_p2 = 0.0;
    c.horizon_slots = 1'000'000;
    Simulator sim(c, SchedulerKind::kOracle);
    sim.run();
    const double q = analytics::success_prob({30, 0.1, 2, 5, 0.1});
    const double ks = ks_distance(sim.metrics(), 0.1, q);
    v.require(ks < 0.05, fmt("KS distance %.4f", ks));
    return v;
}

Verdict matching_optimality() {
    Verdict v;
    std::mt19937_64 gen(20240601);
    int mismatches = 0;
    constexpr int kGraphs = 2000;
    for (int i = 0; i < kGraphs; ++i) {
        const auto g = oracle::random_graph(gen, 8, 6);
        if (max_weight_matching(g).total_weight != oracle::matching_optimum(g)) ++mismatches;
    }
    v.require(mismatches == 0, std::to_string(kGraphs) + " graphs, " + std::to_string(mismatches) + " mismatches");
    return v;
}

Verdict protocol_invariants() {
    Verdict v;
    std::mt19937_64 gen(17);
    std::uniform_int_distribution<std::size_t> n_eds(5, 40), n_ch(1, 4), n_rel(1, 6), buf(1, 3);
    std::uniform_real_distribution<double> p(0.02, 0.3), e1(0.0, 0.5), e2(0.0, 0.6);
    std::vector<NetworkConfig> configs;
    for (int i = 0; i < 10; ++i) {
        NetworkConfig c;
        c.n_eds = n_eds(gen);
        c.n_channels = n_ch(gen);
        c.n_relays = n_rel(gen);
        c.activation_prob = p(gen);
        c.erasure_p1 = {e1(gen)};
        c.erasure_p2 = e2(gen);
        c.buffer_size = buf(gen);
        c.horizon_slots = 10'000;
        c.warmup_slots = 0;
        c.seed = 100 + i;
        configs.push_back(c);
    }
    using enum SchedulerKind;
    for (auto kind : {kMam, kImas, kBufferedImas, kAbdr, kBufferedAbdr}) {
        std::uint64_t slots = 0, erased = 0, collisions = 0, bad_plans = 0, overfull = 0;
        for (const auto& c : configs) {
            Simulator sim(c, kind);
            while (!sim.done()) {
                const auto rec = sim.step();
                ++slots;
                erased += rec.outcome.erased_tx;
                collisions += rec.outcome.ap_collisions;
                bad_plans += plan_violation(rec.plan).has_value();
                for (const auto& held : sim.buffers().per_relay) overfull += held.size() > c.buffer_size;
            }
        }
        const std::string name(to_string(kind));
        bool ok = bad_plans == 0;
        if (kind == kMam || kind == kImas || kind == kBufferedImas) ok = ok && erased == 0 && collisions == 0;
        if (kind == kAbdr || kind == kBufferedAbdr) ok = ok && collisions == 0;
        if (kind == kBufferedAbdr) ok = ok && overfull == 0;
        v.require(ok, name + " " + std::to_string(slots) + " slots: erased " + std::to_string(erased) + ", collisions " +
                          std::to_string(collisions) + ", bad plans " + std::to_string(bad_plans) +
                          (kind == kBufferedAbdr ? ", overfull " + std::to_string(overfull) : ""));
    }
    return v;
}

Verdict per_slot_dominance() {
    Verdict v;
    NetworkConfig c;
    c.horizon_slots = 100'000;
    c.warmup_slots = 0;
    Simulator sim(c, SchedulerKind::kMam);
    std::uint64_t violations = 0, approximate = 0;
    while (!sim.done()) {
        const auto rec = sim.step();
        const auto imas = schedule_imas(rec.captures, rec.h, rec.ages_before);
        violations += scheduled_age_sum(rec.plan, rec.ages_before) < scheduled_age_sum(imas, rec.ages_before);
        approximate += rec.plan.approximate;
    }
    v.require(violations == 0, "100000 slots, " + std::to_string(violations) + " slots with IMAS > MAM, " +
                                   std::to_string(approximate) + " approximate MAM slots");
    return v;
}

double se_diff(const MetricsAccumulator& a, const MetricsAccumulator& b) {
    return std::hypot(a.aaoi_stderr(), b.aaoi_stderr());
}

Verdict figure_orderings() {
    Verdict v;
    using enum SchedulerKind;

    {  // (a) f4
        const auto spec = desk("f4", 500'000);
        const auto t = run_experiment(spec, 0);
        bool mono = true;
        std::string worst;
        for (auto kind : spec.schedulers) {
            for (std::size_t i = 0; i + 1 < spec.values.size(); ++i) {
                const auto& a = row(t, i, kind).metrics;
                const auto& b = row(t, i + 1, kind).metrics;
                if (a.aaoi() - b.aaoi() - kZ95OneSided * se_diff(a, b) <= 0.0) {
                    mono = false;
                    worst += std::string(to_string(kind)) + fmt(" K=%g", spec.values[i]) + " ";
                }
            }
        }
        v.require(mono, "(a) AAoI decreasing in K for every scheduler" + (worst.empty() ? "" : ": " + worst));
        double max_gap = 0.0;
        for (std::size_t i = 0; i < spec.values.size(); ++i) {
            const auto& m = row(t, i, kMam).metrics;
            const auto& im = row(t, i, kImas).metrics;
            max_gap = std::max(max_gap, std::abs(im.aaoi() - m.aaoi()) + kZ95OneSided * se_diff(m, im));
        }
        v.require(max_gap < 1.0, fmt("(a) MAM-IMAS gap upper 95%% bound %.3f", max_gap));
    }
    {  // (b) f8 at eps2 = 0.5
        auto spec = desk("f8", 1'000'000);
        spec.values = {0.5};
        spec.schedulers = {kBufferedAbdr, kBufferedImas};
        const auto t = run_experiment(spec, 0);
        const auto& r = row(t, 0, kBufferedAbdr);
        const double ga = r.metrics.aaoi() - r.bound.aaoi + kZ95OneSided * r.metrics.aaoi_stderr();
        const double gp = r.metrics.paoi() - r.bound.paoi + kZ95OneSided * r.metrics.paoi_stderr();
        v.require(ga <= 1.0, fmt("(b) B-ABDR AAoI gap upper bound %.3f", ga));
        v.require(gp <= 2.0, fmt("(b) B-ABDR PAoI gap upper bound %.3f", gp));
        const auto& bi = row(t, 0, kBufferedImas);
        v.detail += fmt2(" (B-IMAS gaps %.3f / %.3f)", bi.metrics.aaoi() - bi.bound.aaoi, bi.metrics.paoi() - bi.bound.paoi);
    }
    {  // (c) f9
        auto spec = desk("f9", 300'000);
        spec.schedulers = {kImas, kAbdr, kBufferedAbdr};
        const auto t = run_experiment(spec, 0);
        bool closest = true;
        std::string where;
        for (std::size_t i = 0; i < spec.values.size(); ++i) {
            const auto& b = row(t, i, kBufferedAbdr).metrics;
            for (auto other : {kImas, kAbdr}) {
                const auto& o = row(t, i, other).metrics;
                if (o.aaoi() - b.aaoi() - kZ95OneSided * se_diff(o, b) <= 0.0) {
                    closest = false;
                    where += fmt(" N=%g", spec.values[i]);
                }
            }
        }
        const auto& last = row(t, spec.values.size() - 1, kBufferedAbdr);
        v.require(closest, "(c) B-ABDR closest to bound up to N=300" + where +
                               fmt2(" (N=300 gap %.2f of %.1f)", last.metrics.aaoi() - last.bound.aaoi, last.bound.aaoi));
    }
    {  // (d) f10
        const auto spec = desk("f10", 500'000);
        const auto t = run_experiment(spec, 0);
        const std::size_t cont = spec.values.size() - 1;  // R = 0 entry: continuous
        for (auto kind : spec.schedulers) {
            bool nonincreasing = true;
            for (std::size_t i = 0; i + 2 < spec.values.size(); ++i) {
                const auto& a = row(t, i, kind).metrics;
                const auto& b = row(t, i + 1, kind).metrics;
                if (b.aaoi() - a.aaoi() > kZ95OneSided * se_diff(a, b)) nonincreasing = false;
            }
            const auto& c = row(t, cont, kind).metrics;
            const auto& fine = row(t, cont - 1, kind).metrics;
            const auto& coarse = row(t, 0, kind).metrics;
            const double gap = std::abs(fine.aaoi() - c.aaoi());
            const bool approaches = (gap <= kZ95TwoSided * se_diff(fine, c) || gap <= 0.01 * c.aaoi()) &&
                                    coarse.aaoi() - c.aaoi() > gap;
            v.require(nonincreasing && approaches,
                      "(d) " + std::string(to_string(kind)) +
                          fmt2(" R=1 %.3f, R=64 %.3f", coarse.aaoi(), fine.aaoi()) + fmt(", continuous %.3f", c.aaoi()));
        }
    }
    return v;
}

Verdict signaling_ledger() {
    Verdict v;
    bool rows_ok = true;
    for (std::uint64_t k = 1; k <= 8; ++k) {
        for (std::size_t b = 0; b <= 4; ++b) {
            const SymbolBudget s{218, 5, 5, 3, 45, b};
            rows_ok = rows_ok && overhead_symbols(SchedulerKind::kImas, s, k) == k * 5 + k * 5 + 2 * 3;
            rows_ok = rows_ok && overhead_symbols(SchedulerKind::kMam, s, k) == k * 5 + k * 5 + 2 * 3;
            rows_ok = rows_ok && overhead_symbols(SchedulerKind::kBufferedImas, s, k) == k * 5 + k * b * 5 + 2 * 3 + 5;
            rows_ok = rows_ok && overhead_symbols(SchedulerKind::kAbdr, s, k) == 5 + 45 + 2 * 3;
            rows_ok = rows_ok && overhead_symbols(SchedulerKind::kBufferedAbdr, s, k) == 5 + 45 + 2 * 3;
            rows_ok = rows_ok && signaling_cost(SchedulerKind::kImas, s, k).acknowledge == 5;
        }
    }
    v.require(rows_ok, "row formulas for K=1..8, B=0..4");
    const SymbolBudget s{218, 5, 5, 3, 45, 1};
    const auto memoryless = max_rts_budget(s, 5, 1, false);
    const auto buffered = max_rts_budget(s, 5, 1, true);
    v.require(memoryless == 45 && buffered == 75,
              "RTS budget " + std::to_string(memoryless) + " / " + std::to_string(buffered));
    return v;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict determinism() {
    Verdict v;
    const auto dir = std::filesystem::temp_directory_path() / "aoirelay_acceptance_determinism";
    std::filesystem::remove_all(dir);
    for (const auto& name : preset_names()) {
        auto spec = figure_preset(name);
        spec.base.horizon_slots = 3000;
        spec.base.warmup_slots = 100;
        spec.replications = name == "hetnet" ? 3 : 1;
        const auto a = write_outputs(run_experiment(spec, 1), dir / "a" / (name + ".csv"));
        const auto b = write_outputs(run_experiment(spec, 2), dir / "b" / (name + ".csv"));
        bool same = a.size() == b.size();
        for (std::size_t i = 0; same && i < a.size(); ++i) same = slurp(a[i]) == slurp(b[i]);
        v.require(same, name);
    }
    std::filesystem::remove_all(dir);
    return v;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only;
    app.add_option("-c,--criterion", only, "Criterion number(s) to run (default: all)")->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"bound bridge (Oracle vs 1/(pQ), 1e6 slots)", bound_bridge},
        {"optimal activation p* and f5 minimizers", optimal_activation},
        {"closed-form convolution vs brute force", convolution_oracle},
        {"network-AoI CCDF KS distance", theorem_fidelity},
        {"matching optimality vs exhaustive search", matching_optimality},
        {"protocol invariants over random slots", protocol_invariants},
        {"per-slot MAM >= IMAS dominance", per_slot_dominance},
        {"figure orderings f4/f8/f9/f10", figure_orderings},
        {"signaling ledger rows and RTS budget", signaling_ledger},
        {"byte-identical preset CSVs", determinism},
    };

    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        all = all && v.pass;
        std::printf("criterion %2d: %s  %s  [%s] (%.1fs)\n", id, v.pass ? "PASS" : "FAIL", criteria[i].first,
                    v.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}

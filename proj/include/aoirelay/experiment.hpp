#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aoirelay/analytics.hpp"
#include "aoirelay/config.hpp"
#include "aoirelay/signaling.hpp"
#include "aoirelay/simulator.hpp"

namespace aoirelay {

enum class SweepAxis { kNone, kRelays, kChannels, kActivation, kErasureP2, kEds, kResolution };

std::string_view to_string(SweepAxis axis);
/// Accepts "none", "K", "F", "p", "eps2", "N", "R".
SweepAxis parse_sweep_axis(std::string_view name);

/// A batch of simulations: every (sweep value, scheduler, replication).
struct ExperimentSpec {
    std::string name = "experiment";
    NetworkConfig base;
    std::vector<SchedulerKind> schedulers{SchedulerKind::kImas};
    SweepAxis axis = SweepAxis::kNone;
    // For R, 0 stands for continuous time.
    std::vector<double> values;
    std::size_t replications = 5;
    // Replace p with the bound minimizer at every sweep point.
    bool optimize_activation = false;
    // Field sizes; derived from N, K and B when unset.
    std::optional<SymbolBudget> budget;
    // Network-average AoI levels sampled into ccdf_* columns.
    std::vector<double> ccdf_points{20.0, 25.0, 30.0, 35.0, 40.0};
    // Also write <output stem>_ccdf.csv with full empirical and analytic curves.
    bool ccdf_curves = false;
    // Also write per-ED rows and per-scheduler regression of AAoI on eps1.
    bool per_ed = false;
    std::filesystem::path output;

    void validate() const;
    /// Number of sweep points (1 without an axis).
    std::size_t n_points() const noexcept { return axis == SweepAxis::kNone ? 1 : values.size(); }
};

/// Parses the JSON experiment description. Unknown keys are errors.
ExperimentSpec parse_experiment(std::string_view json_text);
ExperimentSpec load_experiment(const std::filesystem::path& path);
/// Canonical JSON of a spec, as embedded in CSV headers.
std::string describe(const ExperimentSpec& spec);

/// Network of sweep point `point`, replication `replication`; seeds differ
/// per replication only, so schedulers and sweep points share randomness.
NetworkConfig point_config(const ExperimentSpec& spec, std::size_t point, std::size_t replication);

struct RunResult {
    std::size_t point = 0;
    double axis_value = 0.0;
    SchedulerKind scheduler = SchedulerKind::kImas;
    std::size_t replication = 0;
    NetworkConfig config;
    std::vector<double> erasure_p1;
    MetricsAccumulator metrics;
    RunCounters counters;
    std::uint64_t overhead_per_slot = 0;
    analytics::BoundResult bound;
    // Per-ED bound AAoI 1/(p Q_i).
    std::vector<double> ed_bound;
    // Against the i.i.d. CCDF; NaN for heterogeneous erasure rates.
    double ks_distance = 0.0;
    double wall_seconds = 0.0;
};

struct ResultTable {
    ExperimentSpec spec;
    std::vector<RunResult> rows;
};

using ProgressFn = std::function<void(const RunResult&, std::size_t done, std::size_t total)>;

/// Runs every simulation of the experiment on `jobs` threads (0: hardware
/// concurrency). Row order and content do not depend on `jobs`.
ResultTable run_experiment(const ExperimentSpec& spec, std::size_t jobs = 0, const ProgressFn& progress = {});

/// Merges the replications of (point, scheduler).
MetricsAccumulator pooled_metrics(const ResultTable& table, std::size_t point, SchedulerKind scheduler);

/// Kolmogorov-Smirnov distance on the 1/N lattice between the measured
/// network-average AoI and the analytic CCDF for success probability q.
double ks_distance(const MetricsAccumulator& metrics, double p, double q);

std::vector<std::string> preset_names();
/// The sweep behind one figure: f3..f10, or hetnet.
ExperimentSpec figure_preset(std::string_view name);

/// Header comment lines, the column row, then one row per result.
void emit_csv(const ResultTable& table, const std::filesystem::path& path);
std::string format_csv(const ResultTable& table);
/// Full CCDF curves, one row per (result, delta).
std::string format_ccdf_csv(const ResultTable& table);
/// One row per (result, ED).
std::string format_per_ed_csv(const ResultTable& table);

struct Regression {
    SchedulerKind scheduler = SchedulerKind::kImas;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t samples = 0;
};
/// Least-squares line of per-ED AAoI against eps1, per scheduler.
std::vector<Regression> per_ed_regressions(const ResultTable& table);
std::string format_regression_csv(const ResultTable& table);

/// Writes the main CSV plus the companion files the experiment asks for; returns
/// every path written.
std::vector<std::filesystem::path> write_outputs(const ResultTable& table, const std::filesystem::path& path);

/// printf("%.9g") without locale surprises; "nan" and "inf" spelled out.
std::string format_number(double value);

} // namespace aoirelay

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aoirelay/config.hpp"
#include "aoirelay/schedulers.hpp"
#include "aoirelay/signaling.hpp"
#include "aoirelay/types.hpp"

namespace aoirelay {

/// Running AAoI/PAoI statistics plus the histogram of the summed AoI
/// (network average times N). Accumulators merge associatively.
class MetricsAccumulator {
public:
    MetricsAccumulator() = default;
    MetricsAccumulator(std::size_t n_eds, std::uint64_t measured_slots, std::size_t n_batches = 10);

    /// Ages in force during a measured slot.
    void record_slot(const AoiState& ages);
    /// AoI of `ed` in the slot where a fresh update of it was delivered.
    void record_peak(std::size_t ed, Age age);

    void merge(const MetricsAccumulator& other);

    std::size_t n_eds() const noexcept { return age_sum_.size(); }
    std::uint64_t slots() const noexcept { return slots_; }
    std::uint64_t peaks() const noexcept;

    double ed_aaoi(std::size_t ed) const;
    /// NaN when the ED never had a delivery.
    double ed_paoi(std::size_t ed) const;
    double aaoi() const;
    double paoi() const;
    /// Batch-means standard errors.
    double aaoi_stderr() const;
    double paoi_stderr() const;

    /// Slot counts indexed by (sum of ages) - N.
    const std::vector<std::uint64_t>& total_histogram() const noexcept { return histogram_; }
    /// Fraction of measured slots with network-average AoI above delta.
    double empirical_ccdf(double delta) const;

private:
    std::size_t batch_of(std::uint64_t slot_index) const;

    std::uint64_t measured_slots_ = 0;
    std::uint64_t slots_ = 0;
    std::vector<std::uint64_t> age_sum_;
    std::vector<std::uint64_t> peak_sum_;
    std::vector<std::uint64_t> peak_count_;
    std::vector<double> batch_age_sum_;
    std::vector<std::uint64_t> batch_slots_;
    std::vector<double> batch_peak_sum_;
    std::vector<std::uint64_t> batch_peak_count_;
    std::vector<std::uint64_t> histogram_;
};

/// Inputs and outputs of one slot, for tracing and property checks.
struct SlotRecord {
    Slot slot = 0;
    AoiState ages_before;
    CaptureReport captures;
    ConnectivityMatrix h;
    TransmissionPlan plan;
    SlotOutcome outcome;
};

struct RunCounters {
    std::uint64_t deliveries = 0;
    std::uint64_t ap_collisions = 0;
    std::uint64_t erased_tx = 0;
    std::uint64_t rts_ties = 0;
    std::uint64_t rts_collisions = 0;
    std::uint64_t approximate_slots = 0;
    std::uint64_t overhead_symbols = 0;
    std::size_t max_buffer_occupancy = 0;

    void merge(const RunCounters& other);
};

/// The slot loop for one scheduler on one network realization.
class Simulator {
public:
    Simulator(NetworkConfig config, SchedulerKind kind);
    Simulator(NetworkConfig config, SchedulerKind kind, SymbolBudget budget);

    /// Runs one slot and returns everything that happened in it.
    SlotRecord step();
    /// Runs the remaining slots of the horizon.
    void run();

    bool done() const noexcept { return slot_ >= config_.horizon_slots; }
    Slot slot() const noexcept { return slot_; }
    const NetworkConfig& config() const noexcept { return config_; }
    SchedulerKind kind() const noexcept { return kind_; }
    const AoiState& ages() const noexcept { return ages_; }
    const RelayBuffers& buffers() const noexcept { return buffers_; }
    std::span<const double> erasure_p1() const noexcept { return erasure_p1_; }
    const MetricsAccumulator& metrics() const noexcept { return metrics_; }
    const RunCounters& counters() const noexcept { return counters_; }

private:
    void advance(SlotRecord* record);

    NetworkConfig config_;
    SchedulerKind kind_;
    SymbolBudget budget_;
    std::vector<double> erasure_p1_;
    Slot slot_ = 0;
    AoiState ages_;
    RelayBuffers buffers_;
    MetricsAccumulator metrics_;
    RunCounters counters_;
};

} // namespace aoirelay

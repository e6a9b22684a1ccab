#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "aoirelay/config.hpp"
#include "aoirelay/rng.hpp"
#include "aoirelay/signaling.hpp"
#include "aoirelay/types.hpp"

namespace aoirelay {

/// Packets each relay kept from earlier slots.
struct RelayBuffers {
    std::size_t capacity = 0;
    std::vector<std::vector<Packet>> per_relay;

    RelayBuffers() = default;
    RelayBuffers(std::size_t n_relays, std::size_t capacity) : capacity(capacity), per_relay(n_relays) {}

    std::size_t occupancy() const noexcept;
};

/// Exact search over candidate sets stops being used above this many
/// distinct-packet candidates; MAM then falls back to greedy sets plus swaps.
inline constexpr std::size_t kMamExactCandidateLimit = 12;

/// Delivers every distinct captured packet straight to the AP, bypassing H
/// and channel limits. This is the lower-bound benchmark.
TransmissionPlan schedule_oracle(const CaptureReport& captures);

/// Every relay forwards every capture on its capture channel.
TransmissionPlan schedule_aloha_forward(const CaptureReport& captures, std::size_t n_channels);

/// Max-age matching over candidate sets of distinct relays and packets.
TransmissionPlan schedule_mam(const CaptureReport& captures, const ConnectivityMatrix& h, const AoiState& ages);

/// Channel-by-channel greedy: each channel takes the oldest remaining packet
/// that has an unassigned relay connected on it.
TransmissionPlan schedule_imas(const CaptureReport& captures, const ConnectivityMatrix& h, const AoiState& ages);

/// IMAS over captures plus buffers, restricted to the freshest known packet of
/// each ED.
TransmissionPlan schedule_b_imas(const CaptureReport& captures, const RelayBuffers& buffers,
                                 const ConnectivityMatrix& h, const AoiState& ages);

/// Sum of source-ED ages over everything the plan transmits.
std::uint64_t scheduled_age_sum(const TransmissionPlan& plan, const AoiState& ages);

// --- Age-based delayed request -------------------------------------------

struct RtsTimer {
    std::size_t relay = 0;
    std::size_t channel = 0;
    double expiry = 0.0; // fraction of the RTS sub-slot, in [0, 1]
};

struct RtsParams {
    double max_delay = 0.1;                   // t*
    std::optional<std::uint32_t> resolution;  // mini-slots; nullopt = continuous
};

/// min(1 - age / max_age + jitter, 1).
double rts_expiry(Age age, Age max_age, double jitter);

/// rts_expiry with jitter ~ U(0, t_star) drawn from rng.
double compute_rts_time(Age age, Age max_age, double t_star, RngStream& rng);

/// Mini-slot of an expiry under resolution R: floor(expiry R), capped at R-1.
std::uint32_t quantize_expiry(double expiry, std::uint32_t resolution);

enum class ChannelGrant { kIdle, kWinner, kCollision };

struct ChannelContention {
    ChannelGrant state = ChannelGrant::kIdle;
    std::vector<std::size_t> relays; // the winner, or every colliding relay
};

struct ContentionResult {
    std::vector<ChannelContention> channels;
    std::size_t exact_ties = 0;
};

/// Runs the RTS race. Continuous: the earliest timer on a channel wins (exact
/// ties go to the lowest relay). Discretized: the earliest occupied mini-slot
/// wins if it holds a single relay, otherwise the channel collides. A relay
/// that signalled on one channel withdraws its other requests; simultaneous
/// requests are processed in ascending channel order.
ContentionResult contend(std::span<const RtsTimer> timers, std::size_t n_channels,
                         std::optional<std::uint32_t> resolution);

/// Memoryless ABDR: each relay requests on the channel it captured on.
TransmissionPlan schedule_abdr(const CaptureReport& captures, const ConnectivityMatrix& h, const AoiState& ages,
                               const RtsParams& params, std::uint64_t seed, Slot slot);

/// ABDR over captures plus buffers; each packet keeps its capture channel.
TransmissionPlan schedule_b_abdr(const CaptureReport& captures, const RelayBuffers& buffers,
                                 const ConnectivityMatrix& h, const AoiState& ages, const RtsParams& params,
                                 std::uint64_t seed, Slot slot);

/// End-of-slot buffer refresh. `next_ages` is the AoI at slot+1 as fed back
/// by the AP. Per relay: merge buffer and captures, drop anything not fresher
/// than what the AP holds, keep one packet per ED, then keep the `capacity`
/// packets whose EDs are oldest (ties: older packet, then lower ED).
RelayBuffers update_buffers(const RelayBuffers& buffers, const CaptureReport& captures,
                            const AoiState& next_ages, Slot slot);

/// Everything a scheduler may look at in one slot.
struct SlotContext {
    const CaptureReport& captures;
    const RelayBuffers& buffers;
    const ConnectivityMatrix& h;
    const AoiState& ages;
    Slot slot = 0;
    std::uint64_t seed = 0;
    RtsParams rts;
};

struct ScheduleResult {
    TransmissionPlan plan;
    std::uint64_t overhead_symbols = 0;
};

ScheduleResult schedule(SchedulerKind kind, const SlotContext& context, const SymbolBudget& budget);

} // namespace aoirelay

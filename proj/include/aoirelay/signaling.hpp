#pragma once

#include <cstddef>
#include <cstdint>

#include "aoirelay/config.hpp"

namespace aoirelay {

/// Phase-2 slot length and signaling field sizes, in symbols.
struct SymbolBudget {
    std::uint64_t t_total = 218;
    std::uint64_t t_pilot = 5;
    std::uint64_t t_id = 5;
    std::uint64_t t_relay_id = 3;
    std::uint64_t t_rts = 45;
    std::size_t buffer_size = 1;

    /// Field sizes for a network: ID fields sized to ceil(log2 N) and
    /// ceil(log2 K) symbols, the rest at their defaults.
    static SymbolBudget for_network(std::size_t n_eds, std::size_t n_relays, std::size_t buffer_size);

    /// Throws ConfigError when an ID field cannot address N EDs or K relays.
    void validate(std::size_t n_eds, std::size_t n_relays) const;
};

std::uint64_t ceil_log2(std::uint64_t n) noexcept;

/// Per-slot signaling, split the way the exchange table splits it: what is
/// spent inside the phase-2 slot, what remains for the packet, and the AP's
/// acknowledge broadcast.
struct SignalingCost {
    std::uint64_t pilot = 0;
    std::uint64_t packet_id = 0;
    std::uint64_t grant = 0;
    std::uint64_t rts = 0;
    std::uint64_t cts = 0;
    // Relay ID carried with the forwarded packet.
    std::uint64_t header = 0;
    // Sent by the AP after the slot; not deducted from the payload.
    std::uint64_t acknowledge = 0;

    std::uint64_t in_slot() const noexcept { return pilot + packet_id + grant + rts + cts + header; }
    /// Symbols left for the packet; negative when signaling overflows the slot.
    std::int64_t payload(std::uint64_t t_total) const noexcept {
        return static_cast<std::int64_t>(t_total) - static_cast<std::int64_t>(in_slot());
    }
};

/// Table rows:
///   IMAS/MAM          K Tp + K Ti + 2 Tk,          ack Ti
///   buffered IMAS/MAM K Tp + K B Ti + 2 Tk + Ti,   ack Ti
///   ABDR/B-ABDR       Tp + Tr + 2 Tk,              ack Ti
/// The ALOHA baseline and the oracle exchange nothing.
SignalingCost signaling_cost(SchedulerKind kind, const SymbolBudget& budget, std::size_t n_relays);

/// In-slot overhead of signaling_cost.
std::uint64_t overhead_symbols(SchedulerKind kind, const SymbolBudget& budget, std::size_t n_relays);

/// Strict upper bound on the RTS length for ABDR to stay cheaper than the
/// centralized schedulers: (K-1) Tp + K Ti against memoryless IMAS/MAM,
/// (K-1) Tp + K (B+1) Ti + Ti against their buffered versions.
std::uint64_t max_rts_budget(const SymbolBudget& budget, std::size_t n_relays, std::size_t buffer_size,
                             bool buffered);

} // namespace aoirelay

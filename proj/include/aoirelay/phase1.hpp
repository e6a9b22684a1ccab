#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aoirelay/config.hpp"
#include "aoirelay/types.hpp"

namespace aoirelay {

/// One slot of ED activity: who transmitted, on which channel, and which
/// ED-to-relay links were erased.
struct Phase1Realization {
    Slot slot = 0;
    std::size_t n_relays = 0;
    std::vector<std::size_t> active_eds;
    std::vector<std::size_t> channel_choice; // parallel to active_eds
    std::vector<std::uint8_t> erased;        // active_eds.size() x n_relays, row-major

    bool is_erased(std::size_t active_index, std::size_t relay) const {
        return erased[active_index * n_relays + relay] != 0;
    }
};

/// Draws activation (prob p), a uniform channel, and per-relay erasures for
/// every ED. Draws come from the (seed, ED, slot) stream in that order, so
/// the realization is identical for every scheduler.
Phase1Realization activate(const NetworkConfig& config, std::span<const double> erasure_p1, Slot slot);

/// Relay k captures on channel f iff exactly one non-erased arrival reaches
/// it on f. Replicas appear when several relays capture the same packet.
CaptureReport resolve_captures(const Phase1Realization& realization, std::size_t n_channels);

} // namespace aoirelay

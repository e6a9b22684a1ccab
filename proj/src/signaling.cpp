#include "aoirelay/signaling.hpp"

#include <string>

namespace aoirelay {

std::uint64_t ceil_log2(std::uint64_t n) noexcept {
    std::uint64_t bits = 0;
    while (bits < 64 && (std::uint64_t{1} << bits) < n) ++bits;
    return bits;
}

SymbolBudget SymbolBudget::for_network(std::size_t n_eds, std::size_t n_relays, std::size_t buffer_size) {
    SymbolBudget b;
    b.t_id = ceil_log2(n_eds);
    b.t_relay_id = ceil_log2(n_relays);
    b.buffer_size = buffer_size;
    return b;
}

void SymbolBudget::validate(std::size_t n_eds, std::size_t n_relays) const {
    if (t_id < ceil_log2(n_eds)) {
        throw ConfigError("t_id", "needs at least " + std::to_string(ceil_log2(n_eds)) + " symbols for " +
                                      std::to_string(n_eds) + " EDs");
    }
    if (t_relay_id < ceil_log2(n_relays)) {
        throw ConfigError("t_relay_id", "needs at least " + std::to_string(ceil_log2(n_relays)) +
                                            " symbols for " + std::to_string(n_relays) + " relays");
    }
}

SignalingCost signaling_cost(SchedulerKind kind, const SymbolBudget& budget, std::size_t n_relays) {
    const std::uint64_t k = n_relays;
    SignalingCost c;
    switch (kind) {
    case SchedulerKind::kMam:
    case SchedulerKind::kImas:
        c.pilot = k * budget.t_pilot;
        c.packet_id = k * budget.t_id;
        c.grant = budget.t_relay_id;
        c.header = budget.t_relay_id;
        c.acknowledge = budget.t_id;
        break;
    case SchedulerKind::kBufferedImas:
        c.pilot = k * budget.t_pilot;
        c.packet_id = k * budget.buffer_size * budget.t_id;
        c.grant = budget.t_relay_id + budget.t_id;
        c.header = budget.t_relay_id;
        c.acknowledge = budget.t_id;
        break;
    case SchedulerKind::kAbdr:
    case SchedulerKind::kBufferedAbdr:
        c.pilot = budget.t_pilot;
        c.rts = budget.t_rts;
        c.cts = budget.t_relay_id;
        c.header = budget.t_relay_id;
        c.acknowledge = budget.t_id;
        break;
    case SchedulerKind::kAlohaForward:
    case SchedulerKind::kOracle:
        break;
    }
    return c;
}

std::uint64_t overhead_symbols(SchedulerKind kind, const SymbolBudget& budget, std::size_t n_relays) {
    return signaling_cost(kind, budget, n_relays).in_slot();
}

std::uint64_t max_rts_budget(const SymbolBudget& budget, std::size_t n_relays, std::size_t buffer_size,
                             bool buffered) {
    const std::uint64_t k = n_relays;
    const std::uint64_t pilots = (k - 1) * budget.t_pilot;
    if (!buffered) return pilots + k * budget.t_id;
    return pilots + k * (buffer_size + 1) * budget.t_id + budget.t_id;
}

} // namespace aoirelay

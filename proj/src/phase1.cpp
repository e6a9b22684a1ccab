#include "aoirelay/phase1.hpp"

#include <algorithm>

#include "aoirelay/rng.hpp"

namespace aoirelay {

Phase1Realization activate(const NetworkConfig& config, std::span<const double> erasure_p1, Slot slot) {
    Phase1Realization r;
    r.slot = slot;
    r.n_relays = config.n_relays;
    for (std::size_t i = 0; i < config.n_eds; ++i) {
        auto rng = rng_stream(config.seed, Entity::kEd, i, slot);
        if (!rng.bernoulli(config.activation_prob)) continue;
        r.active_eds.push_back(i);
        r.channel_choice.push_back(rng.uniform_index(config.n_channels));
        const double eps = erasure_p1[i];
        for (std::size_t k = 0; k < config.n_relays; ++k) {
            r.erased.push_back(rng.bernoulli(eps) ? 1 : 0);
        }
    }
    return r;
}

CaptureReport resolve_captures(const Phase1Realization& realization, std::size_t n_channels) {
    CaptureReport report;
    const std::size_t n_active = realization.active_eds.size();
    if (n_active == 0) return report;

    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> sole(n_channels);
    std::vector<std::size_t> count(n_channels);
    for (std::size_t k = 0; k < realization.n_relays; ++k) {
        std::fill(sole.begin(), sole.end(), kNone);
        std::fill(count.begin(), count.end(), 0);
        for (std::size_t a = 0; a < n_active; ++a) {
            if (realization.is_erased(a, k)) continue;
            const std::size_t f = realization.channel_choice[a];
            ++count[f];
            sole[f] = a;
        }
        for (std::size_t f = 0; f < n_channels; ++f) {
            if (count[f] != 1) continue;
            report.entries.push_back(Packet{realization.active_eds[sole[f]], realization.slot, f, k});
        }
    }
    return report;
}

} // namespace aoirelay

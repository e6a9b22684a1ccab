#include "aoirelay/types.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "aoirelay/rng.hpp"

namespace aoirelay {

AoiState::AoiState(std::size_t n_eds, Age initial) : ages_(n_eds, initial), max_age_(n_eds ? initial : 0) {}

AoiState::AoiState(std::vector<Age> ages) : ages_(std::move(ages)) {
    max_age_ = ages_.empty() ? 0 : *std::max_element(ages_.begin(), ages_.end());
}

std::uint64_t AoiState::total() const noexcept {
    return std::accumulate(ages_.begin(), ages_.end(), std::uint64_t{0});
}

std::vector<Packet> CaptureReport::at_relay(std::size_t relay) const {
    std::vector<Packet> out;
    for (const auto& p : entries) {
        if (p.holder == relay) out.push_back(p);
    }
    return out;
}

std::vector<PacketId> CaptureReport::distinct_ids() const {
    std::vector<PacketId> out;
    for (const auto& p : entries) {
        if (std::find(out.begin(), out.end(), p.id()) == out.end()) out.push_back(p.id());
    }
    return out;
}

ConnectivityMatrix::ConnectivityMatrix(std::size_t n_channels, std::size_t n_relays, bool connected)
    : n_channels_(n_channels), n_relays_(n_relays), bits_(n_channels * n_relays, connected ? 1 : 0) {}

ConnectivityMatrix ConnectivityMatrix::draw(std::size_t n_channels, std::size_t n_relays, double erasure_p2,
                                            std::uint64_t seed, Slot slot) {
    ConnectivityMatrix h(n_channels, n_relays, false);
    for (std::size_t f = 0; f < n_channels; ++f) {
        auto rng = rng_stream(seed, Entity::kChannel, f, slot);
        for (std::size_t k = 0; k < n_relays; ++k) {
            h.set(f, k, !rng.bernoulli(erasure_p2));
        }
    }
    return h;
}

std::size_t TransmissionPlan::transmission_count() const noexcept {
    std::size_t n = 0;
    for (const auto& c : channels) n += c.size();
    return n;
}

std::optional<std::string> plan_violation(const TransmissionPlan& plan, bool allow_multi_channel_relays) {
    std::map<std::size_t, std::size_t> relay_channel;
    std::map<PacketId, std::size_t> id_channel;
    for (std::size_t f = 0; f < plan.channels.size(); ++f) {
        std::set<std::size_t> relays_here;
        for (const auto& tx : plan.channels[f]) {
            if (tx.packet.holder != tx.relay) {
                return "channel " + std::to_string(f) + ": relay " + std::to_string(tx.relay) +
                       " sends a packet held by relay " + std::to_string(tx.packet.holder);
            }
            if (!relays_here.insert(tx.relay).second) {
                return "relay " + std::to_string(tx.relay) + " appears twice on channel " + std::to_string(f);
            }
            auto [it, fresh] = relay_channel.emplace(tx.relay, f);
            if (!fresh && it->second != f && !allow_multi_channel_relays) {
                return "relay " + std::to_string(tx.relay) + " transmits on channels " +
                       std::to_string(it->second) + " and " + std::to_string(f);
            }
            auto [jt, fresh_id] = id_channel.emplace(tx.packet.id(), f);
            if (!fresh_id && jt->second != f) {
                return "packet (ED " + std::to_string(tx.packet.source_ed) + ", slot " +
                       std::to_string(tx.packet.gen_slot) + ") scheduled on two channels";
            }
        }
    }
    return std::nullopt;
}

AoiState advance_ages(AoiState state) {
    for (auto& a : state.ages_) ++a;
    if (!state.ages_.empty()) ++state.max_age_;
    return state;
}

AoiState apply_deliveries(AoiState state, std::span<const Delivery> delivered, Slot slot) {
    for (const auto& d : delivered) {
        if (d.packet.gen_slot > slot) {
            throw std::invalid_argument("delivery generated at slot " + std::to_string(d.packet.gen_slot) +
                                        " is in the future of slot " + std::to_string(slot));
        }
        if (d.age != slot - d.packet.gen_slot) {
            throw std::invalid_argument("delivery age does not match slot - gen_slot");
        }
        if (d.packet.source_ed >= state.ages_.size()) {
            throw std::out_of_range("delivery from unknown ED " + std::to_string(d.packet.source_ed));
        }
    }
    state = advance_ages(std::move(state));
    bool lowered = false;
    for (const auto& d : delivered) {
        Age& a = state.ages_[d.packet.source_ed];
        const Age reset = d.age + 1;
        if (reset < a) {
            a = reset;
            lowered = true;
        }
    }
    if (lowered) state.max_age_ = *std::max_element(state.ages_.begin(), state.ages_.end());
    return state;
}

SlotOutcome resolve_phase2(const TransmissionPlan& plan, const ConnectivityMatrix& h, Slot slot) {
    SlotOutcome out;
    auto deliver = [&](const Packet& p) {
        const bool seen = std::any_of(out.delivered.begin(), out.delivered.end(),
                                      [&](const Delivery& d) { return d.packet.id() == p.id(); });
        if (!seen) out.delivered.push_back({p, slot - p.gen_slot});
    };
    for (const auto& p : plan.ideal_deliveries) deliver(p);

    for (std::size_t f = 0; f < plan.channels.size(); ++f) {
        const Transmission* arrival = nullptr;
        std::size_t arrivals = 0;
        for (const auto& tx : plan.channels[f]) {
            if (h.connected(f, tx.relay)) {
                arrival = &tx;
                ++arrivals;
            } else {
                ++out.erased_tx;
            }
        }
        if (arrivals == 1) {
            deliver(arrival->packet);
        } else if (arrivals > 1) {
            ++out.ap_collisions;
        }
    }
    return out;
}

} // namespace aoirelay

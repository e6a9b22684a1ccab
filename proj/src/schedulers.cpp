#include "aoirelay/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>

#include "aoirelay/matching.hpp"

namespace aoirelay {
namespace {

// Candidates are (relay, packet) pairs: Packet::holder is the relay.
using Candidates = std::vector<Packet>;

// Higher source-ED age first; then lower ED, older packet, lower relay,
// lower capture channel.
bool outranks(const Packet& a, const Packet& b, const AoiState& ages) {
    const Age wa = ages[a.source_ed];
    const Age wb = ages[b.source_ed];
    if (wa != wb) return wa > wb;
    return std::tie(a.source_ed, a.gen_slot, a.holder, a.capture_channel) <
           std::tie(b.source_ed, b.gen_slot, b.holder, b.capture_channel);
}

Candidates from_captures(const CaptureReport& captures) { return captures.entries; }

Candidates with_buffers(const CaptureReport& captures, const RelayBuffers& buffers) {
    Candidates out;
    for (const auto& held : buffers.per_relay) out.insert(out.end(), held.begin(), held.end());
    out.insert(out.end(), captures.entries.begin(), captures.entries.end());
    return out;
}

// Drops every candidate that is older than another candidate of the same ED.
Candidates freshest_per_ed(Candidates candidates) {
    std::vector<std::pair<std::size_t, Slot>> newest;
    for (const auto& c : candidates) {
        auto it = std::find_if(newest.begin(), newest.end(), [&](const auto& e) { return e.first == c.source_ed; });
        if (it == newest.end()) {
            newest.emplace_back(c.source_ed, c.gen_slot);
        } else {
            it->second = std::max(it->second, c.gen_slot);
        }
    }
    std::erase_if(candidates, [&](const Packet& c) {
        auto it = std::find_if(newest.begin(), newest.end(), [&](const auto& e) { return e.first == c.source_ed; });
        return c.gen_slot < it->second;
    });
    return candidates;
}

TransmissionPlan plan_imas(const Candidates& candidates, const ConnectivityMatrix& h, const AoiState& ages) {
    const std::size_t n_channels = h.n_channels();
    TransmissionPlan plan(n_channels);
    std::vector<char> relay_busy(h.n_relays(), 0);
    std::vector<PacketId> sent;
    for (std::size_t f = 0; f < n_channels; ++f) {
        const Packet* best = nullptr;
        for (const auto& c : candidates) {
            if (relay_busy[c.holder] || !h.connected(f, c.holder)) continue;
            if (std::find(sent.begin(), sent.end(), c.id()) != sent.end()) continue;
            if (best == nullptr || outranks(c, *best, ages)) best = &c;
        }
        if (best == nullptr) continue;
        plan.channels[f].push_back({best->holder, *best});
        relay_busy[best->holder] = 1;
        sent.push_back(best->id());
    }
    return plan;
}

class MamSearch {
public:
    MamSearch(const Candidates& candidates, const ConnectivityMatrix& h, const AoiState& ages)
        : candidates_(candidates), h_(h), ages_(ages) {}

    // Every candidate set of at most F pairs with distinct relays and packets
    // that cannot be extended further, in lexicographic index order.
    void exhaustive() {
        std::vector<std::size_t> chosen;
        descend(0, chosen);
    }

    // Greedy set by descending age, then single-element swaps while they
    // strictly improve the matched age sum.
    void greedy_with_swaps() {
        std::vector<std::size_t> order(candidates_.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return outranks(candidates_[a], candidates_[b], ages_);
        });
        std::vector<std::size_t> set;
        for (std::size_t i : order) {
            if (set.size() < h_.n_channels() && compatible(set, i, set.size())) set.push_back(i);
        }
        evaluate(set);
        bool improved = true;
        while (improved) {
            improved = false;
            for (std::size_t pos = 0; pos < set.size() && !improved; ++pos) {
                for (std::size_t i : order) {
                    if (std::find(set.begin(), set.end(), i) != set.end()) continue;
                    if (!compatible(set, i, pos)) continue;
                    auto trial = set;
                    trial[pos] = i;
                    if (evaluate(trial)) {
                        set = std::move(trial);
                        improved = true;
                        break;
                    }
                }
            }
        }
    }

    TransmissionPlan take_plan() {
        TransmissionPlan plan(h_.n_channels());
        for (const auto& [left, channel] : best_pairs_) {
            const Packet& p = candidates_[left];
            plan.channels[channel].push_back({p.holder, p});
        }
        return plan;
    }

private:
    // Whether candidate i can join `set` in place of the element at `skip`
    // (skip == set.size() means pure addition).
    bool compatible(const std::vector<std::size_t>& set, std::size_t i, std::size_t skip) const {
        const Packet& c = candidates_[i];
        for (std::size_t pos = 0; pos < set.size(); ++pos) {
            if (pos == skip) continue;
            const Packet& o = candidates_[set[pos]];
            if (o.holder == c.holder || o.id() == c.id()) return false;
        }
        return true;
    }

    void descend(std::size_t next, std::vector<std::size_t>& chosen) {
        bool extended = false;
        if (chosen.size() < h_.n_channels()) {
            for (std::size_t i = next; i < candidates_.size(); ++i) {
                if (!compatible(chosen, i, chosen.size())) continue;
                chosen.push_back(i);
                descend(i + 1, chosen);
                chosen.pop_back();
                extended = true;
            }
        }
        if (extended) return;
        // Skip sets that a lower-indexed candidate could still extend; that
        // superset is visited on its own branch.
        if (chosen.size() < h_.n_channels()) {
            for (std::size_t i = 0; i < next; ++i) {
                if (std::find(chosen.begin(), chosen.end(), i) == chosen.end() &&
                    compatible(chosen, i, chosen.size())) {
                    return;
                }
            }
        }
        evaluate(chosen);
    }

    // Returns true when the set strictly beats the incumbent.
    bool evaluate(const std::vector<std::size_t>& set) {
        std::uint64_t ceiling = 0;
        for (std::size_t i : set) ceiling += ages_[candidates_[i].source_ed];
        if (ceiling <= best_sum_) return false;
        WeightedBipartiteGraph g(set.size(), h_.n_channels());
        for (std::size_t a = 0; a < set.size(); ++a) {
            const Packet& p = candidates_[set[a]];
            g.set_weight(a, ages_[p.source_ed]);
            for (std::size_t f = 0; f < h_.n_channels(); ++f) {
                if (h_.connected(f, p.holder)) g.add_edge(a, f);
            }
        }
        const Matching m = max_weight_matching(g);
        if (m.total_weight <= best_sum_) return false;
        best_sum_ = m.total_weight;
        best_pairs_.clear();
        for (const auto& pair : m.pairs) best_pairs_.emplace_back(set[pair.left], pair.right);
        return true;
    }

    const Candidates& candidates_;
    const ConnectivityMatrix& h_;
    const AoiState& ages_;
    std::uint64_t best_sum_ = 0;
    std::vector<std::pair<std::size_t, std::size_t>> best_pairs_;
};

TransmissionPlan plan_mam(const Candidates& candidates, const ConnectivityMatrix& h, const AoiState& ages) {
    MamSearch search(candidates, h, ages);
    const bool exact = candidates.size() <= kMamExactCandidateLimit;
    if (exact) {
        search.exhaustive();
    } else {
        search.greedy_with_swaps();
    }
    TransmissionPlan plan = search.take_plan();
    plan.approximate = !exact;
    return plan;
}

TransmissionPlan plan_abdr(const Candidates& candidates, const ConnectivityMatrix& h, const AoiState& ages,
                           const RtsParams& params, std::uint64_t seed, Slot slot) {
    const std::size_t n_channels = h.n_channels();
    const std::size_t n_relays = h.n_relays();
    // One request per (relay, capture channel): the relay's oldest-ED packet there.
    std::vector<const Packet*> pick(n_channels * n_relays, nullptr);
    for (const auto& c : candidates) {
        const Packet*& slot_pick = pick[c.holder * n_channels + c.capture_channel];
        if (slot_pick == nullptr || outranks(c, *slot_pick, ages)) slot_pick = &c;
    }

    std::vector<RtsTimer> timers;
    for (std::size_t k = 0; k < n_relays; ++k) {
        auto rng = rng_stream(seed, Entity::kRelay, k, slot);
        for (std::size_t f = 0; f < n_channels; ++f) {
            const Packet* p = pick[k * n_channels + f];
            // A relay that missed the AP pilot on f stays silent there.
            if (p == nullptr || !h.connected(f, k)) continue;
            timers.push_back({k, f, compute_rts_time(ages[p->source_ed], ages.max_age(), params.max_delay, rng)});
        }
    }

    const ContentionResult race = contend(timers, n_channels, params.resolution);
    TransmissionPlan plan(n_channels);
    plan.rts_ties = race.exact_ties;
    for (std::size_t f = 0; f < n_channels; ++f) {
        const auto& outcome = race.channels[f];
        if (outcome.state == ChannelGrant::kCollision) ++plan.rts_collisions;
        // Colliding relays all transmit; the AP resolves the collision.
        for (std::size_t k : outcome.relays) {
            plan.channels[f].push_back({k, *pick[k * n_channels + f]});
        }
    }
    return plan;
}

} // namespace

std::size_t RelayBuffers::occupancy() const noexcept {
    std::size_t n = 0;
    for (const auto& held : per_relay) n = std::max(n, held.size());
    return n;
}

TransmissionPlan schedule_oracle(const CaptureReport& captures) {
    TransmissionPlan plan;
    for (const auto& p : captures.entries) {
        const bool seen = std::any_of(plan.ideal_deliveries.begin(), plan.ideal_deliveries.end(),
                                      [&](const Packet& q) { return q.id() == p.id(); });
        if (!seen) plan.ideal_deliveries.push_back(p);
    }
    return plan;
}

TransmissionPlan schedule_aloha_forward(const CaptureReport& captures, std::size_t n_channels) {
    TransmissionPlan plan(n_channels);
    for (const auto& p : captures.entries) plan.channels[p.capture_channel].push_back({p.holder, p});
    return plan;
}

TransmissionPlan schedule_mam(const CaptureReport& captures, const ConnectivityMatrix& h, const AoiState& ages) {
    return plan_mam(from_captures(captures), h, ages);
}

TransmissionPlan schedule_imas(const CaptureReport& captures, const ConnectivityMatrix& h, const AoiState& ages) {
    return plan_imas(from_captures(captures), h, ages);
}

TransmissionPlan schedule_b_imas(const CaptureReport& captures, const RelayBuffers& buffers,
                                 const ConnectivityMatrix& h, const AoiState& ages) {
    return plan_imas(freshest_per_ed(with_buffers(captures, buffers)), h, ages);
}

std::uint64_t scheduled_age_sum(const TransmissionPlan& plan, const AoiState& ages) {
    std::uint64_t sum = 0;
    for (const auto& channel : plan.channels) {
        for (const auto& tx : channel) sum += ages[tx.packet.source_ed];
    }
    for (const auto& p : plan.ideal_deliveries) sum += ages[p.source_ed];
    return sum;
}

double rts_expiry(Age age, Age max_age, double jitter) {
    if (age < 1 || age > max_age) {
        throw std::invalid_argument("RTS age " + std::to_string(age) + " outside [1, " + std::to_string(max_age) +
                                    "]");
    }
    return std::min(1.0 - static_cast<double>(age) / static_cast<double>(max_age) + jitter, 1.0);
}

double compute_rts_time(Age age, Age max_age, double t_star, RngStream& rng) {
    if (!(t_star >= 0.0 && t_star <= 1.0)) throw std::invalid_argument("t_star must lie in [0, 1]");
    return rts_expiry(age, max_age, rng.uniform(0.0, t_star));
}

std::uint32_t quantize_expiry(double expiry, std::uint32_t resolution) {
    const double scaled = std::floor(expiry * static_cast<double>(resolution));
    if (scaled <= 0.0) return 0;
    return std::min(static_cast<std::uint32_t>(scaled), resolution - 1);
}

ContentionResult contend(std::span<const RtsTimer> timers, std::size_t n_channels,
                         std::optional<std::uint32_t> resolution) {
    ContentionResult result;
    result.channels.resize(n_channels);
    std::size_t n_relays = 0;
    for (const auto& t : timers) {
        if (t.channel >= n_channels) throw std::out_of_range("RTS timer on unknown channel");
        if (!(t.expiry >= 0.0 && t.expiry <= 1.0)) throw std::invalid_argument("RTS expiry outside [0, 1]");
        n_relays = std::max(n_relays, t.relay + 1);
    }
    std::vector<char> relay_done(n_relays, 0);

    if (!resolution) {
        std::vector<RtsTimer> order(timers.begin(), timers.end());
        std::sort(order.begin(), order.end(), [](const RtsTimer& a, const RtsTimer& b) {
            return std::tie(a.expiry, a.channel, a.relay) < std::tie(b.expiry, b.channel, b.relay);
        });
        std::vector<double> taken_at(n_channels, -1.0);
        for (const auto& t : order) {
            auto& ch = result.channels[t.channel];
            if (relay_done[t.relay]) continue;
            if (ch.state != ChannelGrant::kIdle) {
                if (taken_at[t.channel] == t.expiry) ++result.exact_ties;
                continue;
            }
            ch.state = ChannelGrant::kWinner;
            ch.relays = {t.relay};
            taken_at[t.channel] = t.expiry;
            relay_done[t.relay] = 1;
        }
        return result;
    }

    const std::uint32_t r = *resolution;
    if (r < 1) throw std::invalid_argument("RTS resolution must be at least 1");
    struct Tick {
        std::uint32_t minislot;
        std::size_t channel;
        std::size_t relay;
    };
    std::vector<Tick> ticks;
    ticks.reserve(timers.size());
    for (const auto& t : timers) ticks.push_back({quantize_expiry(t.expiry, r), t.channel, t.relay});
    std::sort(ticks.begin(), ticks.end(), [](const Tick& a, const Tick& b) {
        return std::tie(a.minislot, a.channel, a.relay) < std::tie(b.minislot, b.channel, b.relay);
    });
    for (std::size_t i = 0; i < ticks.size();) {
        std::size_t j = i;
        while (j < ticks.size() && ticks[j].minislot == ticks[i].minislot && ticks[j].channel == ticks[i].channel) ++j;
        auto& ch = result.channels[ticks[i].channel];
        if (ch.state == ChannelGrant::kIdle) {
            for (std::size_t t = i; t < j; ++t) {
                if (!relay_done[ticks[t].relay]) ch.relays.push_back(ticks[t].relay);
            }
            if (!ch.relays.empty()) {
                ch.state = ch.relays.size() == 1 ? ChannelGrant::kWinner : ChannelGrant::kCollision;
                for (std::size_t k : ch.relays) relay_done[k] = 1;
            }
        }
        i = j;
    }
    return result;
}

TransmissionPlan schedule_abdr(const CaptureReport& captures, const ConnectivityMatrix& h, const AoiState& ages,
                               const RtsParams& params, std::uint64_t seed, Slot slot) {
    return plan_abdr(from_captures(captures), h, ages, params, seed, slot);
}

TransmissionPlan schedule_b_abdr(const CaptureReport& captures, const RelayBuffers& buffers,
                                 const ConnectivityMatrix& h, const AoiState& ages, const RtsParams& params,
                                 std::uint64_t seed, Slot slot) {
    // Each relay only knows its own packets, so freshness is judged per relay.
    Candidates candidates;
    for (std::size_t k = 0; k < h.n_relays(); ++k) {
        Candidates mine = k < buffers.per_relay.size() ? buffers.per_relay[k] : Candidates{};
        for (const auto& p : captures.entries) {
            if (p.holder == k) mine.push_back(p);
        }
        mine = freshest_per_ed(std::move(mine));
        candidates.insert(candidates.end(), mine.begin(), mine.end());
    }
    return plan_abdr(candidates, h, ages, params, seed, slot);
}

RelayBuffers update_buffers(const RelayBuffers& buffers, const CaptureReport& captures, const AoiState& next_ages,
                            Slot slot) {
    RelayBuffers out(buffers.per_relay.size(), buffers.capacity);
    for (std::size_t k = 0; k < buffers.per_relay.size(); ++k) {
        Candidates pool = buffers.per_relay[k];
        for (const auto& p : captures.entries) {
            if (p.holder == k) pool.push_back(p);
        }
        // The AP's newest update of ED i was generated at slot + 1 - age_i.
        std::erase_if(pool, [&](const Packet& p) { return p.gen_slot + next_ages[p.source_ed] <= slot + 1; });
        pool = freshest_per_ed(std::move(pool));
        std::sort(pool.begin(), pool.end(), [&](const Packet& a, const Packet& b) {
            const Age wa = next_ages[a.source_ed];
            const Age wb = next_ages[b.source_ed];
            if (wa != wb) return wa > wb;
            return std::tie(a.gen_slot, a.source_ed) < std::tie(b.gen_slot, b.source_ed);
        });
        if (pool.size() > buffers.capacity) pool.resize(buffers.capacity);
        out.per_relay[k] = std::move(pool);
    }
    return out;
}

ScheduleResult schedule(SchedulerKind kind, const SlotContext& ctx, const SymbolBudget& budget) {
    ScheduleResult result;
    switch (kind) {
    case SchedulerKind::kOracle:
        result.plan = schedule_oracle(ctx.captures);
        break;
    case SchedulerKind::kAlohaForward:
        result.plan = schedule_aloha_forward(ctx.captures, ctx.h.n_channels());
        break;
    case SchedulerKind::kMam:
        result.plan = schedule_mam(ctx.captures, ctx.h, ctx.ages);
        break;
    case SchedulerKind::kImas:
        result.plan = schedule_imas(ctx.captures, ctx.h, ctx.ages);
        break;
    case SchedulerKind::kBufferedImas:
        result.plan = schedule_b_imas(ctx.captures, ctx.buffers, ctx.h, ctx.ages);
        break;
    case SchedulerKind::kAbdr:
        result.plan = schedule_abdr(ctx.captures, ctx.h, ctx.ages, ctx.rts, ctx.seed, ctx.slot);
        break;
    case SchedulerKind::kBufferedAbdr:
        result.plan = schedule_b_abdr(ctx.captures, ctx.buffers, ctx.h, ctx.ages, ctx.rts, ctx.seed, ctx.slot);
        break;
    default:
        throw std::invalid_argument("unknown scheduler kind");
    }
    result.overhead_symbols = overhead_symbols(kind, budget, ctx.h.n_relays());
    return result;
}

} // namespace aoirelay

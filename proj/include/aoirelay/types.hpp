#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aoirelay/config.hpp"

namespace aoirelay {

struct Delivery;

/// Identity of an update: two packets with equal identity are replicas.
struct PacketId {
    std::size_t source_ed = 0;
    Slot gen_slot = 0;

    auto operator<=>(const PacketId&) const = default;
};

/// A captured update and where it sits.
struct Packet {
    std::size_t source_ed = 0;
    Slot gen_slot = 0;
    std::size_t capture_channel = 0;
    std::size_t holder = 0;

    PacketId id() const noexcept { return {source_ed, gen_slot}; }
    bool operator==(const Packet&) const = default;
};

/// Instantaneous AoI of every ED, with the maximum cached.
class AoiState {
public:
    AoiState() = default;
    explicit AoiState(std::size_t n_eds, Age initial = 1);
    explicit AoiState(std::vector<Age> ages);

    std::size_t size() const noexcept { return ages_.size(); }
    Age operator[](std::size_t ed) const { return ages_[ed]; }
    std::span<const Age> ages() const noexcept { return ages_; }
    Age max_age() const noexcept { return max_age_; }
    /// Sum of all ages; the network-average AoI times N.
    std::uint64_t total() const noexcept;

    bool operator==(const AoiState&) const = default;

private:
    friend AoiState advance_ages(AoiState state);
    friend AoiState apply_deliveries(AoiState state, std::span<const Delivery> delivered, Slot slot);

    std::vector<Age> ages_;
    Age max_age_ = 0;
};

/// The set of packets captured by relays in one slot.
struct CaptureReport {
    std::vector<Packet> entries;

    std::vector<Packet> at_relay(std::size_t relay) const;
    bool empty() const noexcept { return entries.empty(); }
    /// Distinct identities in first-seen order.
    std::vector<PacketId> distinct_ids() const;
};

/// Phase-2 link state h_{f,k}: 1 when relay k reaches the AP on channel f.
class ConnectivityMatrix {
public:
    ConnectivityMatrix() = default;
    ConnectivityMatrix(std::size_t n_channels, std::size_t n_relays, bool connected = true);

    /// Independent Bernoulli(1 - erasure_p2) per (channel, relay), keyed on
    /// (seed, channel, slot).
    static ConnectivityMatrix draw(std::size_t n_channels, std::size_t n_relays, double erasure_p2,
                                   std::uint64_t seed, Slot slot);

    std::size_t n_channels() const noexcept { return n_channels_; }
    std::size_t n_relays() const noexcept { return n_relays_; }
    bool connected(std::size_t channel, std::size_t relay) const {
        return bits_[channel * n_relays_ + relay] != 0;
    }
    void set(std::size_t channel, std::size_t relay, bool value) {
        bits_[channel * n_relays_ + relay] = value ? 1 : 0;
    }

    bool operator==(const ConnectivityMatrix&) const = default;

private:
    std::size_t n_channels_ = 0;
    std::size_t n_relays_ = 0;
    std::vector<std::uint8_t> bits_;
};

struct Transmission {
    std::size_t relay = 0;
    Packet packet;

    bool operator==(const Transmission&) const = default;
};

/// What the relays send in phase-2 of one slot.
struct TransmissionPlan {
    // Per phase-2 channel. At most one entry except for the ALOHA baseline and
    // RTS mini-slot collisions, where every entry is transmitted and collides.
    std::vector<std::vector<Transmission>> channels;
    // Oracle only: delivered without touching phase-2.
    std::vector<Packet> ideal_deliveries;
    // MAM fell back to the greedy candidate search this slot.
    bool approximate = false;
    // Continuous-mode RTS timers that were exactly equal; lowest relay won.
    std::size_t rts_ties = 0;
    // Channels lost to mini-slot RTS collisions.
    std::size_t rts_collisions = 0;

    explicit TransmissionPlan(std::size_t n_channels = 0) : channels(n_channels) {}

    std::size_t transmission_count() const noexcept;
};

/// Checks the per-relay single-transmission rule and the no-duplicate rule
/// across channels. Returns a description of the first violation.
std::optional<std::string> plan_violation(const TransmissionPlan& plan, bool allow_multi_channel_relays = false);

struct Delivery {
    Packet packet;
    Age age = 0; // slot - gen_slot at delivery
};

struct SlotOutcome {
    std::vector<Delivery> delivered;
    std::size_t ap_collisions = 0;
    std::size_t erased_tx = 0;
    std::uint64_t overhead_symbols = 0;
};

AoiState advance_ages(AoiState state);

/// Next-slot AoI: delivered EDs restart from the delivered packet's age plus
/// one, every other ED advances by one. A stale delivery never raises an age
/// and when one ED has several deliveries the freshest wins.
AoiState apply_deliveries(AoiState state, std::span<const Delivery> delivered, Slot slot);

/// AP-side outcome of a plan: a channel delivers when exactly one non-erased
/// transmission arrives on it.
SlotOutcome resolve_phase2(const TransmissionPlan& plan, const ConnectivityMatrix& h, Slot slot);

} // namespace aoirelay

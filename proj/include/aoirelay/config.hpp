#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aoirelay {

using Slot = std::uint64_t;
using Age = std::uint64_t;

/// Raised for inadmissible configuration values; field() names the offender.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

enum class SchedulerKind {
    kAlohaForward,
    kOracle,
    kMam,
    kImas,
    kBufferedImas,
    kAbdr,
    kBufferedAbdr,
};

std::string_view to_string(SchedulerKind kind);

/// Accepts the canonical names ("ALOHA", "Oracle", "MAM", "IMAS", "B-IMAS",
/// "ABDR", "B-ABDR"), case-insensitively.
SchedulerKind parse_scheduler_kind(std::string_view name);

bool is_buffered(SchedulerKind kind);

struct UniformRange {
    double lo = 0.0;
    double hi = 0.0;
};

/// Every parameter of one simulated network.
struct NetworkConfig {
    std::size_t n_eds = 30;
    double activation_prob = 0.1;
    std::size_t n_channels = 2;
    std::size_t n_relays = 5;
    // One value shared by every ED, or exactly one value per ED.
    std::vector<double> erasure_p1{0.1};
    // When set, per-ED phase-1 erasure rates are drawn from this range once per
    // network realization and erasure_p1 is ignored.
    std::optional<UniformRange> erasure_p1_range;
    double erasure_p2 = 0.1;
    std::size_t buffer_size = 1;
    double rts_max_delay = 0.1;
    // Mini-slots of the RTS timer; nullopt means continuous time.
    std::optional<std::uint32_t> rts_resolution;
    std::uint64_t horizon_slots = 1'000'000;
    std::uint64_t warmup_slots = 1'000;
    std::uint64_t seed = 1;

    void validate() const;
    void validate_for(SchedulerKind kind) const;

    std::uint64_t measured_slots() const { return horizon_slots - warmup_slots; }
};

/// Per-ED phase-1 erasure probabilities for this configuration. Heterogeneous
/// draws are keyed on the seed only, so every scheduler sees the same network.
std::vector<double> resolve_erasure_p1(const NetworkConfig& config);

} // namespace aoirelay

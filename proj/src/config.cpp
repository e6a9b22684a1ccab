#include "aoirelay/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <utility>

#include "aoirelay/rng.hpp"

namespace aoirelay {
namespace {

constexpr std::array<std::pair<SchedulerKind, std::string_view>, 7> kNames{{
    {SchedulerKind::kAlohaForward, "ALOHA"},
    {SchedulerKind::kOracle, "Oracle"},
    {SchedulerKind::kMam, "MAM"},
    {SchedulerKind::kImas, "IMAS"},
    {SchedulerKind::kBufferedImas, "B-IMAS"},
    {SchedulerKind::kAbdr, "ABDR"},
    {SchedulerKind::kBufferedAbdr, "B-ABDR"},
}};

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
    return out;
}

void require_probability(double value, const char* field) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw ConfigError(field, "must lie in [0, 1], got " + std::to_string(value));
    }
}

} // namespace

std::string_view to_string(SchedulerKind kind) {
    for (const auto& [k, name] : kNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

SchedulerKind parse_scheduler_kind(std::string_view name) {
    const std::string wanted = upper(name);
    for (const auto& [kind, canonical] : kNames) {
        if (upper(canonical) == wanted) return kind;
    }
    if (wanted == "ALOHAFORWARD" || wanted == "ALOHA-FORWARD") return SchedulerKind::kAlohaForward;
    if (wanted == "BIMAS") return SchedulerKind::kBufferedImas;
    if (wanted == "BABDR") return SchedulerKind::kBufferedAbdr;
    throw ConfigError("scheduler", "unknown scheduler '" + std::string(name) + "'");
}

bool is_buffered(SchedulerKind kind) {
    return kind == SchedulerKind::kBufferedImas || kind == SchedulerKind::kBufferedAbdr;
}

void NetworkConfig::validate() const {
    if (n_eds < 1) throw ConfigError("n_eds", "must be at least 1");
    if (n_channels < 1) throw ConfigError("n_channels", "must be at least 1");
    if (n_relays < 1) throw ConfigError("n_relays", "must be at least 1");
    require_probability(activation_prob, "activation_prob");
    require_probability(erasure_p2, "erasure_p2");
    require_probability(rts_max_delay, "rts_max_delay");
    if (erasure_p1_range) {
        require_probability(erasure_p1_range->lo, "erasure_p1");
        require_probability(erasure_p1_range->hi, "erasure_p1");
        if (erasure_p1_range->lo > erasure_p1_range->hi) {
            throw ConfigError("erasure_p1", "range lower end exceeds upper end");
        }
    } else {
        if (erasure_p1.size() != 1 && erasure_p1.size() != n_eds) {
            throw ConfigError("erasure_p1", "needs 1 or n_eds (" + std::to_string(n_eds) + ") values, got " +
                                                std::to_string(erasure_p1.size()));
        }
        for (double e : erasure_p1) require_probability(e, "erasure_p1");
    }
    if (rts_resolution && *rts_resolution < 1) {
        throw ConfigError("rts_resolution", "must be at least 1 mini-slot");
    }
    if (horizon_slots < 1) throw ConfigError("horizon_slots", "must be at least 1");
    if (warmup_slots >= horizon_slots) {
        throw ConfigError("warmup_slots", "must be smaller than horizon_slots");
    }
}

void NetworkConfig::validate_for(SchedulerKind kind) const {
    validate();
    if (is_buffered(kind) && buffer_size < 1) {
        throw ConfigError("buffer_size", std::string(to_string(kind)) + " needs a buffer of at least 1 packet");
    }
}

std::vector<double> resolve_erasure_p1(const NetworkConfig& config) {
    if (config.erasure_p1_range) {
        std::vector<double> out(config.n_eds);
        for (std::size_t i = 0; i < config.n_eds; ++i) {
            auto rng = rng_stream(config.seed, Entity::kAp, i, kRealizationSlot);
            out[i] = rng.uniform(config.erasure_p1_range->lo, config.erasure_p1_range->hi);
        }
        return out;
    }
    if (config.erasure_p1.size() == 1) return std::vector<double>(config.n_eds, config.erasure_p1.front());
    return config.erasure_p1;
}

} // namespace aoirelay

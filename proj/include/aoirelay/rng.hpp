#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

#include "aoirelay/config.hpp"

namespace aoirelay {

enum class Entity : std::uint8_t { kEd = 1, kRelay = 2, kAp = 3, kChannel = 4 };

// Slot key used for draws that belong to a whole network realization rather
// than to one slot (e.g. heterogeneous erasure rates).
inline constexpr Slot kRealizationSlot = std::numeric_limits<Slot>::max();

/// Counter-based stream: the tuple (seed, entity, index, slot) is hashed into a
/// SplitMix64 state. Identical tuples replay identical draws, which is what
/// lets every scheduler see the same phase-1 realization for a given seed.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, Entity entity, std::uint64_t index, Slot slot) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return next_u64(); }
    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    bool bernoulli(double p) noexcept { return uniform() < p; }
    /// Uniform on {0, ..., n-1}; n must be positive.
    std::size_t uniform_index(std::size_t n) noexcept;

private:
    std::uint64_t state_;
};

inline RngStream rng_stream(std::uint64_t seed, Entity entity, std::uint64_t index, Slot slot) noexcept {
    return RngStream(seed, entity, index, slot);
}

std::uint64_t mix64(std::uint64_t x) noexcept;

} // namespace aoirelay

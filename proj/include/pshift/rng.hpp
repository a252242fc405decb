#pragma once

// Per-run random streams. Each consumer draws from its own generator seeded
// from (master seed, label), so adding draws in one consumer leaves the
// others unchanged.

#include <cstdint>
#include <random>
#include <string_view>

namespace pshift {

using Rng = std::mt19937_64;

inline constexpr std::string_view kContextStream = "context";
inline constexpr std::string_view kNoiseStream = "noise";
inline constexpr std::string_view kArmStream = "arm";

inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline Rng derive_stream(std::uint64_t seed, std::string_view label) {
    const std::uint64_t tag = fnv1a64(label);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
    return Rng(seq);
}

}  // namespace pshift

#pragma once

#include <cstdint>
#include <random>

namespace firm::detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Independent deterministic stream for (seed, index). Streams are stable
/// across runs and independent of the order tasks execute in, so replicated
/// work (bootstrap replicates, simulation trials) can be parallelised
/// without changing results.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(~index)));
}

} // namespace firm::detail

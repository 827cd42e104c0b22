#pragma once

#include <cstdint>
#include <random>

namespace treeclust {

/// Draws an integer uniformly from [0, n) without modulo bias.
/// Results depend only on the engine state, not on the standard library,
/// so seeded sequences are stable across platforms.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    // rejection sampling over the largest multiple of n below 2^64
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return draw % n;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Mixes a seed with stream identifiers so that independent substreams
/// (e.g. one per experiment trial) can be derived from one master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace treeclust

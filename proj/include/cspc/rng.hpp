#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Seeded randomness used everywhere in the library. The generator is
// std::mt19937_64 (fully specified by the standard); the variate transforms
// below are spelled out here instead of using std::*_distribution because the
// standard leaves those implementation-defined and reports must reproduce
// bit-identically for a given seed.

namespace cspc::rng {

using engine = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(engine& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller (cosine branch, two words per draw).
inline double standard_normal(engine& g) {
    const double u1 = 1.0 - uniform01(g); // (0, 1]
    const double u2 = uniform01(g);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

inline double normal(engine& g, double mu, double sigma) {
    return mu + sigma * standard_normal(g);
}

/// Exponential by inversion.
inline double exponential(engine& g, double rate) {
    return -std::log1p(-uniform01(g)) / rate;
}

/// Unbiased integer in [0, bound) by rejection.
inline std::uint64_t uniform_index(engine& g, std::uint64_t bound) {
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
    std::uint64_t x;
    do {
        x = g();
    } while (x >= limit);
    return x % bound;
}

} // namespace cspc::rng

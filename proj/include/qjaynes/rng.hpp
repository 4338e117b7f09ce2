// Seed derivation and portable draws on top of std::mt19937_64.
//
// The engine itself is bit-exact across platforms; the <random> distribution
// adaptors are not, so uniform/normal variates are produced by hand here and
// per-stream seeds come from a splitmix64 chain. That keeps every Monte Carlo
// result reproducible regardless of thread count or standard library.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qjaynes::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent substream seed for (root seed, stream label, item index).
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t label, std::uint64_t index) {
    return splitmix64(splitmix64(seed ^ splitmix64(label)) ^ index);
}

/// Uniform in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1p-53;
}

inline double uniform(std::mt19937_64& eng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(eng);
}

/// Standard normal via Box-Muller (deterministic given the engine state).
inline double normal(std::mt19937_64& eng) {
    double u = uniform01(eng);
    while (u == 0.0) u = uniform01(eng);
    const double v = uniform01(eng);
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925286766559 * v);
}

}  // namespace qjaynes::rng

#pragma once

// Counter-based deterministic random numbers.
//
// Every Gaussian the simulator draws is a pure function of a 64-bit key, so
// the same logical sample is reproduced at any refinement level, on any
// worker thread, in any execution order. Keys are derived with splitmix64.

#include <cmath>
#include <cstdint>

namespace stfilm::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stable key derivation for (seed, stream, counter) triples.
inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    std::uint64_t k = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
    k = splitmix64(k ^ splitmix64(stream ^ 0xbb67ae8584caa73bULL));
    k = splitmix64(k ^ splitmix64(counter ^ 0x3c6ef372fe94f82bULL));
    return k;
}

/// Uniform in (0,1]: 53 random mantissa bits, never returns 0.
inline double uniform_open0(std::uint64_t key) {
    return (static_cast<double>(key >> 11) + 1.0) * 0x1p-53;
}

/// Standard normal via Box-Muller, one deviate per key (partner discarded).
inline double gaussian(std::uint64_t key) {
    const double u1 = uniform_open0(splitmix64(key ^ 0xa54ff53a5f1d36f1ULL));
    const double u2 = uniform_open0(splitmix64(key ^ 0x510e527fade682d1ULL));
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
}

} // namespace stfilm::rng

#include "stfilm/wiener.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stfilm/errors.hpp"
#include "stfilm/rng.hpp"

namespace stfilm {

namespace {
// stream tags keep increment draws and bridge draws in disjoint key spaces
constexpr std::uint64_t kIncrementStream = 0x57494e4352ULL;
constexpr std::uint64_t kBridgeStream = 0x4252494447ULL;
} // namespace

WienerPath sample_path(std::uint64_t seed, double T, int steps) {
    if (!(T > 0.0) || !std::isfinite(T))
        throw InvalidHorizon("sample_path: T must be positive, got " + std::to_string(T));
    if (steps < 1)
        throw InvalidHorizon("sample_path: steps must be >= 1, got " + std::to_string(steps));

    WienerPath p;
    p.seed = seed;
    p.level = 0;
    const double dt = T / steps;
    const double sd = std::sqrt(dt);
    p.times.resize(static_cast<size_t>(steps) + 1);
    p.values.resize(static_cast<size_t>(steps) + 1);
    p.times[0] = 0.0;
    p.values[0] = 0.0;
    for (int k = 0; k < steps; ++k) {
        p.times[static_cast<size_t>(k) + 1] = (k + 1) * dt;
        const double g = rng::gaussian(rng::derive_key(seed, kIncrementStream, static_cast<std::uint64_t>(k)));
        p.values[static_cast<size_t>(k) + 1] = p.values[static_cast<size_t>(k)] + sd * g;
    }
    p.times.back() = T; // guard the last knot against accumulation drift
    return p;
}

WienerPath refine(const WienerPath& path) {
    const size_t m = path.times.size();
    if (m < 2) throw SimError("refine: path has no interval to refine");

    WienerPath out;
    out.seed = path.seed;
    out.level = path.level + 1;
    out.times.resize(2 * m - 1);
    out.values.resize(2 * m - 1);
    const std::uint64_t lvl = kBridgeStream + static_cast<std::uint64_t>(out.level);
    for (size_t k = 0; k + 1 < m; ++k) {
        const double t0 = path.times[k], t1 = path.times[k + 1];
        const double v0 = path.values[k], v1 = path.values[k + 1];
        out.times[2 * k] = t0;
        out.values[2 * k] = v0;
        out.times[2 * k + 1] = 0.5 * (t0 + t1);
        const double g = rng::gaussian(rng::derive_key(path.seed, lvl, static_cast<std::uint64_t>(k)));
        out.values[2 * k + 1] = 0.5 * (v0 + v1) + 0.5 * std::sqrt(t1 - t0) * g;
    }
    out.times.back() = path.times.back();
    out.values.back() = path.values.back();
    return out;
}

int find_knot(const WienerPath& path, double t) {
    const double tol = 1e-12 * std::max(1.0, std::abs(path.times.back()));
    auto it = std::lower_bound(path.times.begin(), path.times.end(), t - tol);
    if (it == path.times.end()) return -1;
    if (std::abs(*it - t) > tol) return -1;
    return static_cast<int>(it - path.times.begin());
}

double increment(const WienerPath& path, double t1, double t2) {
    if (t2 < t1) throw SimError("increment: t1 must be <= t2");
    const int i1 = find_knot(path, t1);
    const int i2 = find_knot(path, t2);
    if (i1 < 0)
        throw NotAKnot("increment: t1=" + std::to_string(t1) + " is not a sampled knot");
    if (i2 < 0)
        throw NotAKnot("increment: t2=" + std::to_string(t2) + " is not a sampled knot");
    return path.values[static_cast<size_t>(i2)] - path.values[static_cast<size_t>(i1)];
}

} // namespace stfilm

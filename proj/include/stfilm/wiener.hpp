#pragma once

/// @file wiener.hpp
/// @brief Sampled Brownian motion with deterministic Brownian-bridge
///        refinement.
///
/// Every increment and every bridge midpoint is a pure function of
/// (seed, level, index), so one logical path exists at all refinement levels
/// and is reproducible across threads and runs. Increments are knot-aligned
/// only: asking for a time that was never sampled is an error, never an
/// interpolation.

#include <cstdint>
#include <vector>

namespace stfilm {

struct WienerPath {
    std::vector<double> times;  // strictly increasing, times[0] = 0
    std::vector<double> values; // values[0] = 0
    std::uint64_t seed = 0;
    int level = 0; // bridge refinements applied

    int knots() const { return static_cast<int>(times.size()); }
    double horizon() const { return times.back(); }
};

/// Equispaced path on [0,T] with steps i.i.d. Gaussian increments of
/// variance T/steps. Throws InvalidHorizon unless T > 0 and steps >= 1.
WienerPath sample_path(std::uint64_t seed, double T, int steps);

/// Inserts Brownian-bridge midpoints: value ~ Normal((v_k+v_{k+1})/2, dt/4),
/// seeded from (seed, level+1, k). Original knots are preserved bit-for-bit.
WienerPath refine(const WienerPath& path);

/// values(t2) - values(t1) for knot times t1 <= t2; throws NotAKnot.
double increment(const WienerPath& path, double t1, double t2);

/// Index of the knot matching t within a relative tolerance, or -1.
int find_knot(const WienerPath& path, double t);

} // namespace stfilm

#pragma once

/// @file diagnostics.hpp
/// @brief Scalar functionals the simulator's guarantees are phrased in:
///        mass, Dirichlet energy J, entropy, sup-deviation from the mean,
///        the decay-rate fit, the K_eps coefficient, and the interpolation
///        ratio estimators.

#include <cstdint>
#include <vector>

#include "stfilm/grid.hpp"
#include "stfilm/mobility.hpp"

namespace stfilm {

struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    double energy_J = 0.0; // 1/2 integral (du/dx)^2
    double entropy = 0.0;  // integral G_eps(u)
    double min_u = 0.0;
    double max_u = 0.0;
    double sup_dev = 0.0;          // max_j |u_j - reference mean|
    double cum_dissipation = 0.0;  // running sum tau h sum M (D3)^2
    double cum_d2 = 0.0;           // running sum tau h sum (D2)^2
};

/// J(u) = 0.5 * l2_norm(dx(u))^2, central-difference Dirichlet energy.
double energy_J(const Field& u);

/// max_j |u_j - ref_mean|.
double sup_deviation(const Field& u, double ref_mean);

/// Builds a full record (cumulative fields supplied by the orchestrator).
DiagnosticsRecord make_record(double t, const Field& u, const MobilityModel& m, double ref_mean,
                              double cum_dissipation, double cum_d2);

struct KEps {
    double value; // K_eps at the given epsilon
    double limit; // its eps -> 0 limit pi^2 / (16 (pi+1)^2 K_bound)
};

/// K_eps = pi^2 (1 + 2 eps^theta)^2 / (16 (pi+1)^2 sqrt(eps + K_bound^2)).
/// eps = 0 evaluates to the limit. Throws InvalidBound unless K_bound > 0.
KEps k_epsilon(double epsilon, double theta, double K_bound);

struct DecayFit {
    double rate;      // -slope of the ln J vs t least-squares line
    double r_squared; // coefficient of determination
};

/// OLS of ln(energy_J) vs t over records with t >= t_start. Throws
/// InsufficientData (< 10 eligible records) or EnergyUnderflow (a record in
/// the window has J <= 1e-30; the message carries the first hit time).
DecayFit decay_fit(const std::vector<DiagnosticsRecord>& records, double t_start);

struct LemmaRatios {
    double r45; // integral u^beta (D2 u)^2 / [ (1-beta)^2 integral u^{beta-2} (D u)^4 ]
    double r46; // integral u^2 (D2 u)^2 / [ (integral u)^2 integral (D u)^2 ]
};

/// Ratio estimators for the interpolation inequalities the decay proof rests
/// on; +infinity sentinel when a denominator is below 1e-30 (or beta = 1).
/// Throws NonPositiveHeight unless u > 0 everywhere.
LemmaRatios lemma_ratio_estimates(const Field& u, const MobilityModel& m, double beta);

/// Exact discrete Sobolev constant of the grid: the smallest C with
/// sup_dev(u)^2 <= 2 C energy_J(u) for all zero-mean fields without Nyquist
/// content, computed from the central-difference Fourier symbol.
double sobolev_constant(const TorusGrid& g);

/// Sampled estimate of the same constant: max of sup_dev^2 / (2 energy_J)
/// over `samples` random zero-mean band-limited fields. Always <= the exact
/// constant; used as a cross-check oracle.
double estimate_sobolev_ratio(const GridPtr& g, int samples, std::uint64_t seed);

} // namespace stfilm

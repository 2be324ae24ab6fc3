#pragma once

/// @file mobility.hpp
/// @brief Regularized mobility f_eps(s) = s^4/(eps + s^2), its s^2 limit, and
///        the matching entropy pair (G_eps, G_eps'').
///
/// The load-bearing identity is G_eps''(s) = (eps + s^2)/s^4 = 1/f_eps(s):
/// it is what makes the entropy-consistent edge average of the implicit
/// solver dissipate the discrete entropy exactly. eps = 0 selects the limit
/// mobility s^2, which has no eps-entropy; entropy operations reject it.

#include "stfilm/grid.hpp"

namespace stfilm {

struct MobilityModel {
    double epsilon; // >= 0; 0 means the limit mobility s^2
    double theta;   // initial-lift exponent, strictly inside (0, 2/5)

    /// Throws SimError on parameters outside the admissible ranges.
    static MobilityModel make(double epsilon, double theta = 0.3);
};

/// s^4/(eps+s^2) for eps > 0, s^2 for eps = 0. Result in [0, s^2].
/// Throws NegativeHeight for s < 0.
double f_eps(const MobilityModel& m, double s);

/// Derivative (2s^5 + 4 eps s^3)/(eps+s^2)^2; exactly 2s for eps = 0.
double f_eps_prime(const MobilityModel& m, double s);

/// G_eps(s) = eps/(6 s^2) - ln(s).
/// Throws NonPositiveHeight (s <= 0) or LimitMobilityHasNoEpsilonEntropy (eps = 0).
double entropy_G(const MobilityModel& m, double s);

/// G_eps'(s) = -eps/(3 s^3) - 1/s. Needed by the entropy-consistent average.
double entropy_G_prime(const MobilityModel& m, double s);

/// G_eps''(s) = (eps + s^2)/s^4 == 1/f_eps(s).
double entropy_G_second(const MobilityModel& m, double s);

/// Lifted initial condition u0 + eps^theta; strictly positive output.
/// Throws NegativeInitialData if u0 has a negative node, SimError if eps = 0.
Field lift_initial(const MobilityModel& m, const Field& u0);

/// integrate(G_eps o f); throws NonPositiveHeight unless f > 0 everywhere.
double entropy_functional(const MobilityModel& m, const Field& f);

} // namespace stfilm

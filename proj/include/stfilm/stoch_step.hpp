#pragma once

/// @file stoch_step.hpp
/// @brief The stochastic half-dynamics dw = 1/2 w_xx dt + w_x dbeta, solved
///        exactly as a random translation w(t, .) = w(t0, . + dbeta).
///
/// The Ito correction 1/2 w_xx dt is precisely what turns the transport noise
/// into a pure translation, so one shift per sub-interval IS the exact
/// solution; nothing is time-stepped here.
///
/// spectral: each Fourier mode |k| < n/2 is multiplied by the unit phase
/// e^{2 pi i k s / L} (an exact isometry on that subspace); the Nyquist
/// coefficient, whose sine partner vanishes at the nodes, is multiplied by
/// cos(pi n s / L) — the real symmetric convention, which agrees with exact
/// node-shift permutations and never amplifies. Smooth states carry Nyquist
/// energy at rounding level, so the norm identities hold to ~1e-15 on them.
///
/// cubic: periodic cubic-spline interpolation at the shifted nodes. The
/// spline moments sum to zero, so the mean is preserved exactly; overshoot
/// is bounded (no Gibbs), which makes it the fallback when a spectral shift
/// of a barely-positive field dips negative.

#include <functional>

#include "stfilm/grid.hpp"

namespace stfilm {

enum class ShiftMethod { spectral, cubic };

/// Shifted field w(. + delta_beta); delta_beta is any real, reduced mod L.
Field stochastic_shift(const Field& w, double delta_beta, ShiftMethod method = ShiftMethod::spectral);

/// (integrate(phi o w_before), integrate(phi o w_after)) for invariance checks
/// of transport: the continuous flow preserves every such integral.
std::pair<double, double> phi_integral_check(const Field& w_before, const Field& w_after,
                                             const std::function<double(double)>& phi);

} // namespace stfilm

#include "stfilm/stoch_step.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include "stfilm/banded.hpp"
#include "stfilm/errors.hpp"
#include "stfilm/fft.hpp"

namespace stfilm {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double reduce_mod_L(double s, double L) {
    double r = std::fmod(s, L);
    if (r < 0.0) r += L;
    return r;
}

Field shift_spectral(const Field& w, double s) {
    const int n = w.grid->n;
    if ((n & (n - 1)) != 0)
        throw SimError("stochastic_shift: the spectral method needs a power-of-two grid "
                       "(n=" + std::to_string(n) + "); use the cubic method instead");
    const double L = w.grid->L;

    std::vector<std::complex<double>> a(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) a[static_cast<size_t>(j)] = w[j];
    fft::forward(a);

    for (int k = 1; k < n / 2; ++k) {
        const double ang = kTwoPi * k * s / L;
        const std::complex<double> ph(std::cos(ang), std::sin(ang));
        a[static_cast<size_t>(k)] *= ph;
        a[static_cast<size_t>(n - k)] *= std::conj(ph);
    }
    a[static_cast<size_t>(n / 2)] *= std::cos(kTwoPi * 0.5 * n * s / L);

    fft::inverse(a);
    Field out(w.grid);
    for (int j = 0; j < n; ++j) out[j] = a[static_cast<size_t>(j)].real();
    return ensure_finite(out, "stochastic_shift(spectral)");
}

Field shift_cubic(const Field& w, double s) {
    const int n = w.grid->n;
    const double h = w.grid->h;

    // periodic cubic spline moments M_j = S''(x_j):
    // (h/6) M_{j-1} + (2h/3) M_j + (h/6) M_{j+1} = (w_{j+1} - 2 w_j + w_{j-1})/h
    CyclicBanded sys(n, 1);
    std::vector<double> rhs(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        sys.at(j, -1) = h / 6.0;
        sys.at(j, 0) = 2.0 * h / 3.0;
        sys.at(j, +1) = h / 6.0;
        const int jp = wrap_index(j + 1, n);
        const int jm = wrap_index(j - 1, n);
        rhs[static_cast<size_t>(j)] = (w[jp] - 2.0 * w[j] + w[jm]) / h;
    }
    sys.factor(1e-15);
    const std::vector<double> mom = sys.solve(rhs);

    // all targets x_j + s share one fractional cell offset
    const int cell = static_cast<int>(std::floor(s / h));
    const double t = s / h - cell; // in [0,1)
    const double omt = 1.0 - t;
    const double h2_6 = h * h / 6.0;
    const double bL = (omt * omt * omt - omt) * h2_6;
    const double bR = (t * t * t - t) * h2_6;

    Field out(w.grid);
    for (int j = 0; j < n; ++j) {
        const int k = wrap_index(j + cell, n);
        const int kp = wrap_index(k + 1, n);
        out[j] = w[k] * omt + w[kp] * t + mom[static_cast<size_t>(k)] * bL +
                 mom[static_cast<size_t>(kp)] * bR;
    }
    return ensure_finite(out, "stochastic_shift(cubic)");
}

} // namespace

Field stochastic_shift(const Field& w, double delta_beta, ShiftMethod method) {
    const double s = reduce_mod_L(delta_beta, w.grid->L);
    if (s == 0.0) return w;
    return method == ShiftMethod::spectral ? shift_spectral(w, s) : shift_cubic(w, s);
}

std::pair<double, double> phi_integral_check(const Field& w_before, const Field& w_after,
                                             const std::function<double(double)>& phi) {
    if (w_before.grid->n != w_after.grid->n)
        throw SimError("phi_integral_check: fields on different grids");
    double a = 0.0, b = 0.0;
    for (int j = 0; j < w_before.grid->n; ++j) {
        a += phi(w_before[j]);
        b += phi(w_after[j]);
    }
    return {w_before.grid->h * a, w_after.grid->h * b};
}

} // namespace stfilm

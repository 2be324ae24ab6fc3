#include <cmath>
#include <vector>

#include "doctest.h"
#include "stfilm/diagnostics.hpp"
#include "stfilm/errors.hpp"
#include "stfilm/stoch_step.hpp"
#include "test_util.hpp"

using namespace stfilm;
using testutil::kPi;

namespace {

// analytic left translation of a truncated Fourier field
struct Harmonics {
    double offset;
    std::vector<double> a, b; // cos / sin coefficients, modes 1..kmax

    double eval(double x, double L) const {
        double s = offset;
        for (size_t k = 1; k <= a.size(); ++k) {
            const double ph = 2.0 * kPi * static_cast<double>(k) * x / L;
            s += a[k - 1] * std::cos(ph) + b[k - 1] * std::sin(ph);
        }
        return s;
    }
};

Harmonics random_harmonics(std::uint64_t seed, int kmax) {
    Harmonics h;
    h.offset = 2.0;
    std::uint64_t ctr = 0;
    for (int k = 1; k <= kmax; ++k) {
        h.a.push_back(testutil::uniform_in(seed, ctr, -1.0, 1.0) / k);
        h.b.push_back(testutil::uniform_in(seed, ctr, -1.0, 1.0) / k);
    }
    return h;
}

} // namespace

TEST_CASE("a shift by a whole number of cells is a cyclic index permutation") {
    const GridPtr g = TorusGrid::make(1.0, 64); // h is a power of two: m*h is exact
    std::uint64_t ctr = 0;
    const Field u = testutil::rough_positive_field(g, 5, ctr, 0.5, 2.0);
    for (int m : {1, 7, 31, -3}) {
        const double s = m * g->h;
        const Field cub = stochastic_shift(u, s, ShiftMethod::cubic);
        const Field spectral = stochastic_shift(u, s, ShiftMethod::spectral);
        for (int j = 0; j < g->n; ++j) {
            const double expect = u[wrap_index(j + m, g->n)];
            CHECK(cub[j] == expect); // node values pass through the interpolant untouched
            CHECK(spectral[j] == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("the spectral shift is exact on band-limited fields") {
    const double L = 2.0;
    const GridPtr g = TorusGrid::make(L, 64);
    std::uint64_t ctr = 0;
    for (int trial = 0; trial < 12; ++trial) {
        const Harmonics hh = random_harmonics(100 + static_cast<std::uint64_t>(trial), g->n / 3);
        const Field u = Field::from_fn(g, [&](double x) { return hh.eval(x, L); });
        const double s = testutil::uniform_in(200, ctr, -3.0 * L, 3.0 * L);
        const Field shifted = stochastic_shift(u, s, ShiftMethod::spectral);
        for (int j = 0; j < g->n; ++j)
            CHECK(shifted[j] == doctest::Approx(hh.eval(g->x[j] + s, L)).epsilon(5e-12));
    }
}

TEST_CASE("the spectral shift preserves norms, mass, and energy") {
    const GridPtr g = TorusGrid::make(1.0, 128);
    std::uint64_t ctr = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const Field u = testutil::band_limited_field(g, 300 + static_cast<std::uint64_t>(trial),
                                                     ctr, g->n / 3, 1.5);
        const double s = testutil::uniform_in(301, ctr, -2.0, 2.0);
        const Field w = stochastic_shift(u, s, ShiftMethod::spectral);
        CHECK(l2_norm(w) == doctest::Approx(l2_norm(u)).epsilon(1e-13));
        CHECK(integrate(w) == doctest::Approx(integrate(u)).epsilon(1e-13));
        CHECK(energy_J(w) == doctest::Approx(energy_J(u)).epsilon(1e-12));
    }
}

TEST_CASE("the cubic shift conserves mass exactly even on rough fields") {
    const GridPtr g = TorusGrid::make(1.0, 48); // not a power of two
    std::uint64_t ctr = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const Field u = testutil::rough_positive_field(g, 400 + static_cast<std::uint64_t>(trial),
                                                       ctr, 0.3, 3.0);
        const double s = testutil::uniform_in(401, ctr, -2.0, 2.0);
        const Field w = stochastic_shift(u, s, ShiftMethod::cubic);
        CHECK(integrate(w) == doctest::Approx(integrate(u)).epsilon(1e-13));
    }
}

TEST_CASE("the cubic shift converges at high order on smooth fields") {
    const double L = 1.0, s = 0.2137;
    const auto sup_err = [&](int n) {
        const GridPtr g = TorusGrid::make(L, n);
        const Field u =
            Field::from_fn(g, [&](double x) { return 1.0 + std::sin(2.0 * kPi * x / L); });
        const Field w = stochastic_shift(u, s, ShiftMethod::cubic);
        double worst = 0.0;
        for (int j = 0; j < n; ++j)
            worst = std::max(worst,
                             std::abs(w[j] - (1.0 + std::sin(2.0 * kPi * (g->x[j] + s) / L))));
        return worst;
    };
    const double e1 = sup_err(64), e2 = sup_err(128);
    CHECK(e1 < 1e-5);
    CHECK(e1 / e2 > 8.0); // at least third order in practice (splines give ~h^4)
}

TEST_CASE("observable integrals are unchanged by permutation shifts") {
    const GridPtr g = TorusGrid::make(1.0, 32);
    std::uint64_t ctr = 0;
    const Field u = testutil::rough_positive_field(g, 7, ctr, 0.5, 2.0);
    const Field w = stochastic_shift(u, 5 * g->h, ShiftMethod::cubic);
    const auto cube = [](double v) { return v * v * v; };
    const auto expo = [](double v) { return std::exp(v); };
    const auto [c0, c1] = phi_integral_check(u, w, cube);
    CHECK(c0 == c1); // same multiset of node values
    const auto [e0, e1] = phi_integral_check(u, w, expo);
    CHECK(e0 == e1);
}

TEST_CASE("zero and full-period shifts are the identity") {
    const GridPtr g = TorusGrid::make(1.0, 64);
    std::uint64_t ctr = 0;
    const Field u = testutil::band_limited_field(g, 9, ctr, 10, 2.0);
    for (ShiftMethod m : {ShiftMethod::spectral, ShiftMethod::cubic}) {
        const Field w0 = stochastic_shift(u, 0.0, m);
        CHECK(w0.v == u.v);
        // s and s + 7L reduce to the same displacement; 0.25 + 7.0 is exact
        // in floating point, so the outputs must be bit-identical
        const double s = 0.25;
        const Field ws = stochastic_shift(u, s, m);
        const Field wp = stochastic_shift(u, s + 7.0 * g->L, m);
        CHECK(ws.v == wp.v);
    }
}

TEST_CASE("constant fields are fixed points of both methods") {
    const GridPtr g = TorusGrid::make(1.0, 32);
    const Field c(g, 3.25);
    for (ShiftMethod m : {ShiftMethod::spectral, ShiftMethod::cubic}) {
        const Field w = stochastic_shift(c, 0.7771, m);
        for (int j = 0; j < g->n; ++j) CHECK(w[j] == doctest::Approx(3.25).epsilon(1e-14));
    }
}

TEST_CASE("the spectral method requires a power-of-two grid, the cubic does not") {
    const GridPtr g = TorusGrid::make(1.0, 12);
    const Field u = Field::from_fn(g, [&](double x) { return 1.0 + 0.3 * std::sin(2.0 * kPi * x); });
    CHECK_THROWS_AS(stochastic_shift(u, 0.1, ShiftMethod::spectral), SimError);
    const Field w = stochastic_shift(u, 0.1, ShiftMethod::cubic);
    CHECK(integrate(w) == doctest::Approx(integrate(u)).epsilon(1e-13));
}

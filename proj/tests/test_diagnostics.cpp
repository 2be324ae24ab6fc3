#include <cmath>
#include <vector>

#include "doctest.h"
#include "stfilm/diagnostics.hpp"
#include "stfilm/errors.hpp"
#include "stfilm/mobility.hpp"
#include "test_util.hpp"

using namespace stfilm;
using testutil::kPi;

TEST_CASE("the Dirichlet energy of a single harmonic is in closed form") {
    // u = a sin(2 pi k x / L): the centered difference maps it to a cosine of
    // amplitude a*lambda_k, and the energy is J = (1/4) lambda_k^2 L a^2
    const double L = 2.0;
    const GridPtr g = TorusGrid::make(L, 64);
    for (int k : {1, 3, 16}) {
        const double a = 0.7;
        const Field u = Field::from_fn(
            g, [&](double x) { return 5.0 + a * std::sin(2.0 * kPi * k * x / L); });
        const double lam = testutil::lambda_k(*g, k);
        CHECK(energy_J(u) == doctest::Approx(0.25 * lam * lam * L * a * a).epsilon(1e-13));
    }
    CHECK(energy_J(Field(g, 4.2)) == 0.0);
}

TEST_CASE("sup deviation and record assembly") {
    const GridPtr g = TorusGrid::make(1.0, 16);
    Field u(g, 2.0);
    u[3] = 2.5;
    u[9] = 1.2;
    CHECK(sup_deviation(u, 2.0) == doctest::Approx(0.8).epsilon(1e-15));

    const MobilityModel m = MobilityModel::make(1e-2);
    const DiagnosticsRecord r = make_record(0.75, u, m, 2.0, 1.5, 2.5);
    CHECK(r.t == 0.75);
    CHECK(r.mass == doctest::Approx(integrate(u)).epsilon(1e-15));
    CHECK(r.energy_J == doctest::Approx(energy_J(u)).epsilon(1e-15));
    CHECK(r.entropy == doctest::Approx(entropy_functional(m, u)).epsilon(1e-15));
    CHECK(r.min_u == 1.2);
    CHECK(r.max_u == 2.5);
    CHECK(r.sup_dev == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(r.cum_dissipation == 1.5);
    CHECK(r.cum_d2 == 2.5);
}

TEST_CASE("the entropy-dissipation constant: frozen values and limits") {
    // at epsilon = 1, theta = 0.3, K = 1 the closed form gives
    // pi^2/(16 (pi+1)^2) * (1 + 2)^2 / sqrt(2)
    const KEps k = k_epsilon(1.0, 0.3, 1.0);
    CHECK(k.value == doctest::Approx(0.22886137934778199).epsilon(1e-14));
    CHECK(k.limit == doctest::Approx(0.03596209628633856).epsilon(1e-14));

    // the epsilon -> 0 limit is reported exactly at epsilon = 0
    const KEps k0 = k_epsilon(0.0, 0.3, 1.0);
    CHECK(k0.value == k0.limit);
    CHECK(k0.limit == doctest::Approx(0.03596209628633856).epsilon(1e-14));

    // and the value approaches it from above as epsilon shrinks
    const double v3 = k_epsilon(1e-3, 0.3, 1.0).value;
    const double v6 = k_epsilon(1e-6, 0.3, 1.0).value;
    CHECK(v3 > v6);
    CHECK(v6 > k0.limit);
    CHECK(v6 == doctest::Approx(k0.limit).epsilon(1e-2));

    // larger height bounds give smaller constants
    CHECK(k_epsilon(1e-2, 0.3, 2.0).value < k_epsilon(1e-2, 0.3, 1.0).value);

    CHECK_THROWS_AS(k_epsilon(1e-2, 0.3, 0.0), InvalidBound);
    CHECK_THROWS_AS(k_epsilon(1e-2, 0.3, -1.0), InvalidBound);
    CHECK_THROWS_AS(k_epsilon(-1e-2, 0.3, 1.0), InvalidBound);
}

namespace {

std::vector<DiagnosticsRecord> synthetic_decay(double J0, double rate, double wiggle,
                                               int count, double T) {
    std::vector<DiagnosticsRecord> out;
    for (int i = 0; i < count; ++i) {
        DiagnosticsRecord r;
        r.t = T * i / (count - 1);
        r.energy_J = J0 * std::exp(-rate * r.t) * (1.0 + wiggle * std::sin(13.0 * r.t));
        out.push_back(r);
    }
    return out;
}

} // namespace

TEST_CASE("decay fitting recovers exact exponential rates") {
    const auto recs = synthetic_decay(7.0, 3.0, 0.0, 50, 5.0);
    const DecayFit f = decay_fit(recs, 0.0);
    CHECK(f.rate == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));

    // a restricted window uses only late records
    const DecayFit g = decay_fit(recs, 2.5);
    CHECK(g.rate == doctest::Approx(3.0).epsilon(1e-10));

    const auto noisy = synthetic_decay(7.0, 3.0, 0.01, 120, 5.0);
    const DecayFit h = decay_fit(noisy, 0.0);
    CHECK(h.rate == doctest::Approx(3.0).epsilon(0.05));
    CHECK(h.r_squared > 0.99);
}

TEST_CASE("decay fitting failure modes are typed") {
    CHECK_THROWS_AS(decay_fit({}, 0.0), InsufficientData);
    CHECK_THROWS_AS(decay_fit(synthetic_decay(7.0, 3.0, 0.0, 9, 1.0), 0.0), InsufficientData);
    // only 5 of 50 records are past t_start = 4.6
    CHECK_THROWS_AS(decay_fit(synthetic_decay(7.0, 3.0, 0.0, 50, 5.0), 4.6), InsufficientData);

    auto under = synthetic_decay(7.0, 3.0, 0.0, 50, 5.0);
    under[30].energy_J = 0.0; // dead energy inside the fit window
    CHECK_THROWS_AS(decay_fit(under, 0.0), EnergyUnderflow);
    // ... but records before the window are allowed to underflow
    under[30].energy_J = 1e-40;
    CHECK_NOTHROW(decay_fit(under, under[31].t));

    auto flat = synthetic_decay(7.0, 3.0, 0.0, 20, 1.0);
    for (auto& r : flat) r.t = 0.5; // degenerate time window
    CHECK_THROWS_AS(decay_fit(flat, 0.0), InsufficientData);
}

TEST_CASE("interpolation-inequality ratio probes") {
    const GridPtr g = TorusGrid::make(1.0, 64);
    const MobilityModel m = MobilityModel::make(1e-2);

    // constant fields have no gradient: both ratios degenerate to infinity
    const LemmaRatios flat = lemma_ratio_estimates(Field(g, 1.5), m, 0.5);
    CHECK(std::isinf(flat.r45));
    CHECK(std::isinf(flat.r46));

    // beta = 1 removes the (1-beta)^2 weight: r45 is reported as infinite
    const Field u = Field::from_fn(
        g, [&](double x) { return 1.0 + 0.4 * std::sin(2.0 * kPi * x); });
    const LemmaRatios b1 = lemma_ratio_estimates(u, m, 1.0);
    CHECK(std::isinf(b1.r45));
    CHECK(std::isfinite(b1.r46));

    const LemmaRatios r = lemma_ratio_estimates(u, m, 0.5);
    CHECK(std::isfinite(r.r45));
    CHECK(r.r45 > 0.0);
    CHECK(std::isfinite(r.r46));
    CHECK(r.r46 > 0.0);

    Field bad = u;
    bad[5] = 0.0;
    CHECK_THROWS_AS(lemma_ratio_estimates(bad, m, 0.5), NonPositiveHeight);
}

TEST_CASE("the discrete embedding constant is exactly attained") {
    for (int n : {16, 64, 33}) {
        const double L = n == 33 ? 2.0 : 1.0;
        const GridPtr g = TorusGrid::make(L, n);

        // independent evaluation of C = (2/L) sum_{k=1}^{ceil(n/2)-1} lambda_k^{-2}
        double C_ref = 0.0;
        for (int k = 1; 2 * k < n; ++k) {
            const double lam = testutil::lambda_k(*g, k);
            C_ref += 2.0 / (lam * lam);
        }
        C_ref /= L;
        const double C = sobolev_constant(*g);
        CHECK(C == doctest::Approx(C_ref).epsilon(1e-13));

        // the equality case of the chained Cauchy-Schwarz argument: coefficients
        // proportional to lambda_k^{-2} peak at x = 0 and meet the bound exactly
        Field u(g, 0.0);
        for (int k = 1; 2 * k < n; ++k) {
            const double lam = testutil::lambda_k(*g, k);
            for (int j = 0; j < g->n; ++j)
                u[j] += (1.0 / (lam * lam)) * std::cos(2.0 * kPi * k * j / n);
        }
        const double ratio = sup_deviation(u, 0.0) * sup_deviation(u, 0.0) / (2.0 * energy_J(u));
        CHECK(ratio == doctest::Approx(C).epsilon(1e-12));
    }
}

TEST_CASE("sampled ratios stay below the constant and are deterministic") {
    const GridPtr g = TorusGrid::make(1.0, 64);
    const double C = sobolev_constant(*g);
    std::uint64_t ctr = 0;
    for (int i = 0; i < 10; ++i) {
        const Field u = testutil::band_limited_field(g, 900 + static_cast<std::uint64_t>(i), ctr,
                                                     g->n / 3, 0.0);
        if (energy_J(u) == 0.0) continue;
        const double ratio = sup_deviation(u, 0.0) * sup_deviation(u, 0.0) / (2.0 * energy_J(u));
        CHECK(ratio <= C * (1.0 + 1e-12));
    }

    const double est1 = estimate_sobolev_ratio(g, 200, 77);
    const double est2 = estimate_sobolev_ratio(g, 200, 77);
    CHECK(est1 == est2);
    CHECK(est1 > 0.0);
    CHECK(est1 <= C * (1.0 + 1e-12));
}

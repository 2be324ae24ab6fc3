#include "stfilm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "stfilm/errors.hpp"
#include "stfilm/rng.hpp"

namespace stfilm {

namespace {
constexpr double kPi = 3.141592653589793238462643383280;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kUnderflowFloor = 1e-30;
} // namespace

double energy_J(const Field& u) {
    const Field g = dx(u);
    double s = 0.0;
    for (double a : g.v) s += a * a;
    return 0.5 * u.grid->h * s;
}

double sup_deviation(const Field& u, double ref_mean) {
    double s = 0.0;
    for (double a : u.v) s = std::max(s, std::abs(a - ref_mean));
    return s;
}

DiagnosticsRecord make_record(double t, const Field& u, const MobilityModel& m, double ref_mean,
                              double cum_dissipation, double cum_d2) {
    DiagnosticsRecord r;
    r.t = t;
    r.mass = integrate(u);
    r.energy_J = energy_J(u);
    r.entropy = entropy_functional(m, u);
    r.min_u = min_value(u);
    r.max_u = max_value(u);
    r.sup_dev = sup_deviation(u, ref_mean);
    r.cum_dissipation = cum_dissipation;
    r.cum_d2 = cum_d2;
    return r;
}

KEps k_epsilon(double epsilon, double theta, double K_bound) {
    if (!(K_bound > 0.0))
        throw InvalidBound("k_epsilon: K_bound must be > 0, got " + std::to_string(K_bound));
    if (!(epsilon >= 0.0)) throw InvalidBound("k_epsilon: epsilon must be >= 0");
    const double pref = kPi * kPi / (16.0 * (kPi + 1.0) * (kPi + 1.0));
    const double limit = pref / K_bound;
    if (epsilon == 0.0) return {limit, limit};
    const double lift = 1.0 + 2.0 * std::pow(epsilon, theta);
    const double value = pref * lift * lift / std::sqrt(epsilon + K_bound * K_bound);
    return {value, limit};
}

DecayFit decay_fit(const std::vector<DiagnosticsRecord>& records, double t_start) {
    std::vector<double> ts, ys;
    for (const auto& r : records) {
        if (r.t < t_start) continue;
        if (r.energy_J <= kUnderflowFloor)
            throw EnergyUnderflow("decay_fit: energy_J underflowed (" +
                                  std::to_string(r.energy_J) + ") at t=" + std::to_string(r.t));
        ts.push_back(r.t);
        ys.push_back(std::log(r.energy_J));
    }
    const size_t m = ts.size();
    if (m < 10)
        throw InsufficientData("decay_fit: need at least 10 records with t >= t_start, have " +
                               std::to_string(m));

    double tbar = 0.0, ybar = 0.0;
    for (size_t i = 0; i < m; ++i) {
        tbar += ts[i];
        ybar += ys[i];
    }
    tbar /= static_cast<double>(m);
    ybar /= static_cast<double>(m);
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (size_t i = 0; i < m; ++i) {
        const double dt = ts[i] - tbar, dy = ys[i] - ybar;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if (!(stt > 0.0)) throw InsufficientData("decay_fit: degenerate time window");
    const double slope = sty / stt;
    double r2 = 1.0;
    if (syy > 0.0) {
        double ss_res = 0.0;
        for (size_t i = 0; i < m; ++i) {
            const double resid = (ys[i] - ybar) - slope * (ts[i] - tbar);
            ss_res += resid * resid;
        }
        r2 = 1.0 - ss_res / syy;
    }
    return {-slope, r2};
}

LemmaRatios lemma_ratio_estimates(const Field& u, const MobilityModel& m, double beta) {
    (void)m; // ratios depend on the state only; the model fixes the run's units
    for (double a : u.v)
        if (!(a > 0.0))
            throw NonPositiveHeight("lemma_ratio_estimates: field must be strictly positive");
    const Field du = dx(u);
    const Field d2u = dxx(u);
    const int n = u.grid->n;
    const double h = u.grid->h;
    double num45 = 0.0, den45 = 0.0, num46 = 0.0, den46 = 0.0, massum = 0.0;
    for (int j = 0; j < n; ++j) {
        const double uu = u[j], d1 = du[j], d2 = d2u[j];
        num45 += std::pow(uu, beta) * d2 * d2;
        den45 += std::pow(uu, beta - 2.0) * d1 * d1 * d1 * d1;
        num46 += uu * uu * d2 * d2;
        den46 += d1 * d1;
        massum += uu;
    }
    num45 *= h;
    den45 *= h * (1.0 - beta) * (1.0 - beta);
    num46 *= h;
    den46 *= h * (h * massum) * (h * massum);

    const double inf = std::numeric_limits<double>::infinity();
    LemmaRatios out;
    out.r45 = (beta == 1.0 || den45 < kUnderflowFloor) ? inf : num45 / den45;
    out.r46 = den46 < kUnderflowFloor ? inf : num46 / den46;
    return out;
}

double sobolev_constant(const TorusGrid& g) {
    // sup|u|^2 <= (sum_{k != 0} lambda_k^{-2} / L) * 2 J for zero-mean fields
    // with no Nyquist content; lambda_k = sin(2 pi k / n)/h is the central-
    // difference symbol (it vanishes at k = n/2, hence the exclusion). One
    // conjugate pair exists for every k with 2k < n, including k = (n-1)/2
    // on odd grids.
    double s = 0.0;
    for (int k = 1; 2 * k < g.n; ++k) {
        const double lam = std::sin(kTwoPi * k / g.n) / g.h;
        s += 2.0 / (lam * lam);
    }
    return s / g.L;
}

double estimate_sobolev_ratio(const GridPtr& g, int samples, std::uint64_t seed) {
    const int n = g->n;
    const int kmax = std::max(1, n / 3); // band-limited: the central symbol
                                         // vanishes at Nyquist, so rough
                                         // fields would make the ratio blow up
    constexpr std::uint64_t kStream = 0x50B0713FULL;
    double best = 0.0;
    std::uint64_t ctr = 0;
    for (int s = 0; s < samples; ++s) {
        // random spectral slope spreads samples between rough and smooth
        const double p =
            0.5 + 2.0 * rng::uniform_open0(rng::derive_key(seed, kStream, ctr++));
        Field f(g);
        for (int k = 1; k <= kmax; ++k) {
            const double amp = std::pow(static_cast<double>(k), -p);
            const double a = amp * rng::gaussian(rng::derive_key(seed, kStream, ctr++));
            const double b = amp * rng::gaussian(rng::derive_key(seed, kStream, ctr++));
            const double w = kTwoPi * k / n;
            for (int j = 0; j < n; ++j) f[j] += a * std::cos(w * j) + b * std::sin(w * j);
        }
        const double J = energy_J(f);
        if (!(J > 0.0)) continue;
        const double dev = sup_deviation(f, 0.0);
        best = std::max(best, dev * dev / (2.0 * J));
    }
    return best;
}

} // namespace stfilm

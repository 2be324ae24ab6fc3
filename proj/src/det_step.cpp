#include "stfilm/det_step.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "stfilm/banded.hpp"
#include "stfilm/errors.hpp"

namespace stfilm {

double edge_mobility(const MobilityModel& m, double vL, double vR, EdgeRule rule) {
    if (!(vL > 0.0) || !(vR > 0.0))
        throw NonPositiveHeight("edge_mobility: node heights must be > 0, got " +
                                std::to_string(vL) + ", " + std::to_string(vR));
    switch (rule) {
    case EdgeRule::arithmetic:
        return 0.5 * (f_eps(m, vL) + f_eps(m, vR));
    case EdgeRule::harmonic: {
        const double fL = f_eps(m, vL), fR = f_eps(m, vR);
        return 2.0 * fL * fR / (fL + fR);
    }
    case EdgeRule::entropy_consistent: {
        if (std::abs(vR - vL) <= 1e-12 * std::max(vL, vR)) return f_eps(m, 0.5 * (vL + vR));
        return (vR - vL) / (entropy_G_prime(m, vR) - entropy_G_prime(m, vL));
    }
    }
    throw SimError("edge_mobility: unknown rule");
}

namespace {

// dM/dvL and dM/dvR for the Jacobian
void edge_mobility_grad(const MobilityModel& m, double vL, double vR, EdgeRule rule, double& dL,
                        double& dR) {
    switch (rule) {
    case EdgeRule::arithmetic:
        dL = 0.5 * f_eps_prime(m, vL);
        dR = 0.5 * f_eps_prime(m, vR);
        return;
    case EdgeRule::harmonic: {
        const double fL = f_eps(m, vL), fR = f_eps(m, vR);
        const double den = (fL + fR) * (fL + fR);
        dL = 2.0 * fR * fR * f_eps_prime(m, vL) / den;
        dR = 2.0 * fL * fL * f_eps_prime(m, vR) / den;
        return;
    }
    case EdgeRule::entropy_consistent: {
        if (std::abs(vR - vL) <= 1e-12 * std::max(vL, vR)) {
            const double fp = f_eps_prime(m, 0.5 * (vL + vR));
            dL = 0.5 * fp;
            dR = 0.5 * fp;
            return;
        }
        const double dv = vR - vL;
        const double dg = entropy_G_prime(m, vR) - entropy_G_prime(m, vL);
        dL = (-dg + dv * entropy_G_second(m, vL)) / (dg * dg);
        dR = (dg - dv * entropy_G_second(m, vR)) / (dg * dg);
        return;
    }
    }
    throw SimError("edge_mobility_grad: unknown rule");
}

struct Workspace {
    std::vector<double> flux;  // F_{j+1/2}
    std::vector<double> mob;   // M_{j+1/2}
    std::vector<double> d3;    // D3_{j+1/2}
    std::vector<double> resid; // R_j
    std::vector<double> trial;
};

// residual R_j = u_j - v_j + (tau/h)(F_j - F_{j-1}); also fills flux pieces.
// Returns max_j |R_j|. u must be strictly positive (checked by the caller).
double residual(const Field& v, const std::vector<double>& u, const MobilityModel& m,
                EdgeRule rule, double tau, Workspace& ws) {
    const int n = v.grid->n;
    const double h = v.grid->h;
    const double inv_h3 = 1.0 / (h * h * h);
    ws.flux.resize(static_cast<size_t>(n));
    ws.mob.resize(static_cast<size_t>(n));
    ws.d3.resize(static_cast<size_t>(n));
    ws.resid.resize(static_cast<size_t>(n));
    for (int e = 0; e < n; ++e) { // edge e sits between nodes e and e+1
        const int ep1 = wrap_index(e + 1, n);
        const int ep2 = wrap_index(e + 2, n);
        const int em1 = wrap_index(e - 1, n);
        const double d3 = (u[static_cast<size_t>(ep2)] - 3.0 * u[static_cast<size_t>(ep1)] +
                           3.0 * u[static_cast<size_t>(e)] - u[static_cast<size_t>(em1)]) *
                          inv_h3;
        const double mob = edge_mobility(m, u[static_cast<size_t>(e)], u[static_cast<size_t>(ep1)], rule);
        ws.d3[static_cast<size_t>(e)] = d3;
        ws.mob[static_cast<size_t>(e)] = mob;
        ws.flux[static_cast<size_t>(e)] = mob * d3;
    }
    const double c = tau / h;
    double rmax = 0.0;
    for (int j = 0; j < n; ++j) {
        const int em = wrap_index(j - 1, n);
        const double r = u[static_cast<size_t>(j)] - v[j] +
                         c * (ws.flux[static_cast<size_t>(j)] - ws.flux[static_cast<size_t>(em)]);
        ws.resid[static_cast<size_t>(j)] = r;
        rmax = std::max(rmax, std::abs(r));
    }
    return rmax;
}

bool all_positive(const std::vector<double>& u) {
    for (double a : u)
        if (!(a > 0.0)) return false;
    return true;
}

// J(j,k) = dR_j/du_k: identity + (tau/h) * (dF_j - dF_{j-1}); F_e couples
// u_{e-1}..u_{e+2}, so row j touches u_{j-2}..u_{j+2}.
void assemble_jacobian(const Field& v, const std::vector<double>& u, const MobilityModel& m,
                       EdgeRule rule, double tau, const Workspace& ws, CyclicBanded& J) {
    const int n = v.grid->n;
    const double h = v.grid->h;
    const double inv_h3 = 1.0 / (h * h * h);
    const double c = tau / h;
    J.clear();
    for (int j = 0; j < n; ++j) J.at(j, 0) = 1.0;
    for (int e = 0; e < n; ++e) {
        const int ep1 = wrap_index(e + 1, n);
        double dL, dR;
        edge_mobility_grad(m, u[static_cast<size_t>(e)], u[static_cast<size_t>(ep1)], rule, dL, dR);
        const double mob = ws.mob[static_cast<size_t>(e)];
        const double d3 = ws.d3[static_cast<size_t>(e)];
        // dF_e/du at offsets relative to e: -1, 0, +1, +2
        const double cm1 = mob * (-inv_h3);
        const double c0 = dL * d3 + mob * (3.0 * inv_h3);
        const double cp1 = dR * d3 + mob * (-3.0 * inv_h3);
        const double cp2 = mob * inv_h3;
        // row e gains +c * dF_e, row e+1 gains -c * dF_e
        J.at(e, -1) += c * cm1;
        J.at(e, 0) += c * c0;
        J.at(e, +1) += c * cp1;
        J.at(e, +2) += c * cp2;
        J.at(ep1, -2) -= c * cm1;
        J.at(ep1, -1) -= c * c0;
        J.at(ep1, 0) -= c * cp1;
        J.at(ep1, +1) -= c * cp2;
    }
}

} // namespace

SubstepResult deterministic_substep(const Field& v, const MobilityModel& m,
                                    const DetStepConfig& cfg, double tau) {
    if (!(tau > 0.0)) throw SimError("deterministic_substep: tau must be > 0");
    const int n = v.grid->n;
    for (int j = 0; j < n; ++j)
        if (!(v[j] > 0.0))
            throw PositivityLoss("deterministic_substep: input state has a non-positive node");

    Workspace ws;
    CyclicBanded J(n, 2);
    std::vector<double> u = v.v;

    // The residual cannot be evaluated below the rounding floor of the flux
    // assembly: the third difference costs ~8 ulp(u) before the 1/h^3, and
    // the tau/h scaling of two flux values amplifies that to
    // 16 eps |u| M tau / h^4 per node (plus ~8 ulp(u) from the node terms).
    // Demanding less than this floor makes large steps unreachable no matter
    // how well Newton does, so it joins the tolerance.
    const double h4 = std::pow(v.grid->h, 4);
    const auto noise_floor = [&](const std::vector<double>& state, const Workspace& w) {
        double umax = 0.0;
        for (double a : state) umax = std::max(umax, std::abs(a));
        double mmax = 0.0;
        for (double mm : w.mob) mmax = std::max(mmax, mm);
        return std::numeric_limits<double>::epsilon() * umax *
               (8.0 + 16.0 * mmax * tau / h4);
    };

    double rnorm = residual(v, u, m, cfg.averaging, tau, ws);
    double tol = cfg.newton_tol + noise_floor(u, ws);
    int iters = 0;
    bool converged = rnorm <= tol;
    bool polished = false;

    // After the tolerance is met, one more full Newton step lands the
    // residual at the rounding floor; quadratic convergence makes it nearly
    // free and keeps the telescoped mass drift at machine level.
    while (!(converged && polished)) {
        if (iters >= cfg.newton_max_iter)
            throw NewtonDivergence("deterministic_substep: residual " + std::to_string(rnorm) +
                                   " after " + std::to_string(iters) + " iterations");
        assemble_jacobian(v, u, m, cfg.averaging, tau, ws, J);
        J.factor(cfg.linear_solver_tol);
        std::vector<double> step(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) step[static_cast<size_t>(j)] = -ws.resid[static_cast<size_t>(j)];
        std::vector<double> dir = J.solve(step);
        ++iters;

        if (converged) {
            // polish step: accept the full correction if it stays positive
            ws.trial = u;
            for (int j = 0; j < n; ++j) ws.trial[static_cast<size_t>(j)] += dir[static_cast<size_t>(j)];
            if (all_positive(ws.trial)) {
                u = ws.trial;
                rnorm = residual(v, u, m, cfg.averaging, tau, ws);
            }
            polished = true;
            continue;
        }

        double lambda = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 40; ++halving) {
            ws.trial = u;
            for (int j = 0; j < n; ++j)
                ws.trial[static_cast<size_t>(j)] += lambda * dir[static_cast<size_t>(j)];
            // u is positive, so if the full step is positive every damped one
            // is too (convex combination); a violation can only happen first.
            if (halving == 0 && !all_positive(ws.trial))
                throw PositivityLoss("deterministic_substep: Newton iterate left the positive "
                                     "cone at tau=" + std::to_string(tau));
            const double rtrial = residual(v, ws.trial, m, cfg.averaging, tau, ws);
            if (rtrial < rnorm) {
                u = ws.trial;
                rnorm = rtrial;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            // a residual at the assembly rounding floor cannot be improved;
            // that is convergence, not divergence
            if (rnorm <= 8.0 * tol) {
                converged = true;
                continue;
            }
            throw NewtonDivergence("deterministic_substep: damped line search stalled at "
                                   "residual " + std::to_string(rnorm));
        }
        tol = cfg.newton_tol + noise_floor(u, ws);
        converged = rnorm <= tol;
    }

    if (!all_positive(u))
        throw PositivityLoss("deterministic_substep: accepted state has a non-positive node");

    // dissipation and entropy production of the accepted state
    const double h = v.grid->h;
    double diss = 0.0;
    for (int e = 0; e < n; ++e)
        diss += ws.mob[static_cast<size_t>(e)] * ws.d3[static_cast<size_t>(e)] * ws.d3[static_cast<size_t>(e)];
    diss *= tau * h;
    double ent = 0.0;
    const double inv_h2 = 1.0 / (h * h);
    for (int j = 0; j < n; ++j) {
        const int jp = wrap_index(j + 1, n);
        const int jm = wrap_index(j - 1, n);
        const double d2 = (u[static_cast<size_t>(jp)] - 2.0 * u[static_cast<size_t>(j)] +
                           u[static_cast<size_t>(jm)]) *
                          inv_h2;
        ent += d2 * d2;
    }
    ent *= tau * h;

    SubstepResult out{Field(v.grid, std::move(u)), diss, ent, iters};
    ensure_finite(out.v, "deterministic_substep");
    return out;
}

std::pair<Field, DetTelemetry> run_deterministic(const Field& v, const MobilityModel& m,
                                                 const DetStepConfig& cfg, double duration) {
    if (!(duration > 0.0)) throw SimError("run_deterministic: duration must be > 0");
    if (!(cfg.dt_internal > 0.0)) throw SimError("run_deterministic: cfg.dt_internal must be > 0");

    Field state = v;
    DetTelemetry tel;

    double tau = cfg.tau_init;
    if (!(tau > 0.0)) {
        double fmax = 0.0;
        for (int j = 0; j < v.grid->n; ++j) fmax = std::max(fmax, f_eps(m, std::max(v[j], 0.0)));
        const double h4 = std::pow(v.grid->h, 4);
        tau = fmax > 0.0 ? h4 / (8.0 * fmax) : cfg.dt_internal;
    }
    tau = std::min(tau, cfg.dt_internal);

    double advanced = 0.0;
    int streak = 0;
    while (advanced < duration * (1.0 - 1e-15)) {
        const double step = std::min(tau, duration - advanced);
        try {
            SubstepResult r = deterministic_substep(state, m, cfg, step);
            state = std::move(r.v);
            advanced += step;
            tel.accepted += 1;
            tel.newton_iters += r.newton_iters;
            tel.dissipation += r.dissipation;
            tel.entropy_production += r.entropy_production;
            if (++streak >= 5) {
                tau = std::min(tau * 1.2, cfg.dt_internal);
                streak = 0;
            }
        } catch (const PositivityLoss&) {
            tel.rejected += 1;
            streak = 0;
            tau = 0.5 * step;
        } catch (const NewtonDivergence&) {
            tel.rejected += 1;
            streak = 0;
            tau = 0.5 * step;
        } catch (const LinearSolveFailure&) {
            tel.rejected += 1;
            streak = 0;
            tau = 0.5 * step;
        }
        if (tau < duration * 1e-12)
            throw StepCollapse("run_deterministic: substep collapsed to " + std::to_string(tau) +
                               " (duration " + std::to_string(duration) + ")");
    }
    tel.last_tau = tau;
    return {std::move(state), tel};
}

} // namespace stfilm

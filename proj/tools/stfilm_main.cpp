/// @file stfilm_main.cpp
/// @brief Command-line front end: single runs, ensembles, convergence
///        studies, decay-rate fits, and a built-in invariant self-check.
///
/// Exit codes: 0 success, 1 run/validation failure, 2 usage error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stfilm/diagnostics.hpp"
#include "stfilm/ensemble.hpp"
#include "stfilm/errors.hpp"
#include "stfilm/io.hpp"
#include "stfilm/rng.hpp"
#include "stfilm/splitting.hpp"

namespace fs = std::filesystem;
using namespace stfilm;

namespace {

int cmd_simulate(const RunConfig& cfg, bool quiet) {
    Trajectory t = run_single(cfg);
    fs::create_directories(cfg.output_dir);
    const std::string traj_path = (fs::path(cfg.output_dir) / "trajectory.csv").string();
    write_trajectory_csv(traj_path, t.diagnostics);
    write_snapshot((fs::path(cfg.output_dir) / "snapshot_initial.csv").string(),
                   t.snapshots.front(), t.times.front(), cfg.epsilon);
    write_snapshot((fs::path(cfg.output_dir) / "snapshot_final.csv").string(),
                   t.snapshots.back(), t.times.back(), cfg.epsilon);
    if (!quiet) {
        const DiagnosticsRecord& a = t.diagnostics.front();
        const DiagnosticsRecord& b = t.diagnostics.back();
        std::printf("simulate: %zu records over t in [%g, %g]\n", t.times.size(),
                    t.times.front(), t.times.back());
        std::printf("  mass        %.17g -> %.17g (rel drift %.3g)\n", a.mass, b.mass,
                    std::abs(b.mass - a.mass) / std::abs(a.mass));
        std::printf("  energy_J    %.6g -> %.6g\n", a.energy_J, b.energy_J);
        std::printf("  sup_dev     %.6g -> %.6g\n", a.sup_dev, b.sup_dev);
        std::printf("  min height  %.6g over the whole run\n",
                    std::min_element(t.diagnostics.begin(), t.diagnostics.end(),
                                     [](const auto& x, const auto& y) {
                                         return x.min_u < y.min_u;
                                     })
                        ->min_u);
        std::printf("  newton iters %lld, rejected %lld, cubic fallbacks %lld\n",
                    static_cast<long long>(t.telemetry.newton_iters),
                    static_cast<long long>(t.telemetry.rejected),
                    static_cast<long long>(t.telemetry.cubic_fallbacks));
        std::printf("  wrote %s and snapshots under %s\n", traj_path.c_str(),
                    cfg.output_dir.c_str());
    }
    return 0;
}

int cmd_ensemble(const RunConfig& cfg, bool quiet) {
    const EnsembleStats st = run_ensemble(cfg);
    if (!quiet) {
        std::printf("ensemble: %d/%d paths completed", st.completed, cfg.ensemble_size);
        if (!st.failed_replicas.empty())
            std::printf(" (%zu failed)", st.failed_replicas.size());
        std::printf("\n");
        if (!st.times.empty()) {
            const std::size_t k = st.times.size() - 1;
            std::printf("  final t=%g: J_mean %.6g, J_q05 %.6g, J_q95 %.6g\n", st.times[k],
                        st.J_mean[k], st.J_q05[k], st.J_q95[k]);
            std::printf("  final sup_dev mean %.6g, max %.6g, fraction decayed %.3f\n",
                        st.supdev_mean[k], st.supdev_max[k], st.fraction_decayed[k]);
        }
        std::printf("  outputs under %s\n", cfg.output_dir.c_str());
    }
    return 0;
}

int cmd_converge_split(const RunConfig& cfg, bool quiet) {
    const Field u0 = build_initial_condition(cfg);
    SplittingConfig sc = to_splitting_config(cfg);
    const WienerPath p = path_for_replica(cfg, 0);
    const int doublings = std::max(1, cfg.n_doublings);
    const auto gaps = splitting_self_convergence(u0, sc, p, doublings);
    if (!quiet) {
        std::printf("%10s %14s %14s\n", "N_plus_1", "delta", "gap_to_2x");
        for (const auto& [N, gap] : gaps)
            std::printf("%10d %14.6g %14.6g\n", N, cfg.T / N, gap);
    }
    if (gaps.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (const auto& [N, gap] : gaps) {
            if (!(gap > 0.0)) continue;
            const double lx = std::log(cfg.T / N), ly = std::log(gap);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++m;
        }
        if (m >= 2) {
            const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
            if (!quiet) std::printf("observed order (log-log slope): %.3f\n", slope);
        }
    }
    return 0;
}

int cmd_converge_eps(RunConfig cfg, bool quiet) {
    if (cfg.epsilon_sweep_values.empty()) cfg.epsilon_sweep_values = {1e-1, 1e-2, 1e-3};
    const EpsilonSweepReport rep = epsilon_sweep(cfg);
    if (!quiet) {
        std::printf("%12s %14s %14s %14s\n", "epsilon", "min_floor", "decay_rate",
                    "correction");
        for (const auto& e : rep.entries)
            std::printf("%12g %14.6g %14.6g %14.6g\n", e.epsilon, e.min_floor, e.decay_rate,
                        e.correction);
        for (std::size_t i = 0; i < rep.gaps.size(); ++i)
            std::printf("gap(%g, %g) = %.6g\n", rep.entries[i].epsilon,
                        rep.entries[i + 1].epsilon, rep.gaps[i]);
    }
    return 0;
}

int cmd_decay_fit(const std::string& csv, double t_start, bool quiet) {
    const std::vector<DiagnosticsRecord> records = read_trajectory_csv(csv);
    if (records.empty()) throw InsufficientData("no records in " + csv);
    const double ts = t_start < 0.0 ? 0.1 * records.back().t : t_start;
    const DecayFit fit = decay_fit(records, ts);
    if (!quiet)
        std::printf("decay fit over t >= %g: rate %.8g, r^2 %.8g\n", ts, fit.rate,
                    fit.r_squared);
    return 0;
}

struct CheckRow {
    std::string name;
    bool pass;
    std::string detail;
};

int cmd_validate(const RunConfig& user_cfg, bool quiet) {
    // Fixed small-grid setup; only the seed is taken from the user config.
    RunConfig cfg;
    cfg.L = 1.0;
    cfg.n = 32;
    cfg.T = 0.05;
    cfg.N_plus_1 = 16;
    cfg.epsilon = 1e-2;
    cfg.initial_condition = InitialCondition::sine_bump;
    cfg.amplitude = 0.3;
    cfg.mean_level = 1.0;
    cfg.seed = user_cfg.seed;

    std::vector<CheckRow> rows;
    const auto add = [&](const std::string& name, bool pass, const std::string& detail) {
        rows.push_back({name, pass, detail});
    };
    char buf[160];

    try {
        const Trajectory t = run_single(cfg);
        const auto& d = t.diagnostics;

        double drift = 0.0;
        for (const auto& r : d)
            drift = std::max(drift, std::abs(r.mass - d.front().mass) / std::abs(d.front().mass));
        std::snprintf(buf, sizeof buf, "max rel drift %.3g (tol 1e-10)", drift);
        add("mass conservation", drift < 1e-10, buf);

        double rise = 0.0;
        for (std::size_t k = 1; k < d.size(); ++k)
            rise = std::max(rise, d[k].energy_J - d[k - 1].energy_J);
        std::snprintf(buf, sizeof buf, "max J increase %.3g (tol %.3g)", rise,
                      1e-10 * d.front().energy_J);
        add("energy monotonicity", rise <= 1e-10 * d.front().energy_J, buf);

        const double ent0 = d.front().entropy;
        const double slack = 1e-6 * std::max(1e-30, std::abs(ent0));
        double worst = -1e300;
        for (const auto& r : d) worst = std::max(worst, r.entropy + r.cum_d2 - ent0);
        std::snprintf(buf, sizeof buf, "max (entropy+cum_d2-entropy0) %.3g (tol %.3g)", worst,
                      slack);
        add("entropy dissipation bound", worst <= slack, buf);

        double floor = 1e300;
        for (const auto& r : d) floor = std::min(floor, r.min_u);
        std::snprintf(buf, sizeof buf, "min height %.3g", floor);
        add("strict positivity", floor > 0.0, buf);

        const double C = sobolev_constant(*t.snapshots.front().grid);
        double excess = -1e300;
        for (const auto& r : d)
            excess = std::max(excess, r.sup_dev - std::sqrt(2.0 * C * r.energy_J));
        std::snprintf(buf, sizeof buf, "max sup_dev excess %.3g (tol 1e-10)", excess);
        add("sup-norm energy bound", excess <= 1e-10, buf);

        // stochastic shift isometry on random band-limited fields
        const GridPtr g = t.snapshots.front().grid;
        double iso = 0.0;
        std::uint64_t ctr = 0;
        for (int s = 0; s < 200; ++s) {
            Field f(g, 1.0);
            for (int k = 1; k <= g->n / 3; ++k) {
                const double a = rng::gaussian(rng::derive_key(cfg.seed, 0x56414cULL, ctr++)) / k;
                const double b = rng::gaussian(rng::derive_key(cfg.seed, 0x56414cULL, ctr++)) / k;
                for (int j = 0; j < g->n; ++j)
                    f[j] += a * std::cos(2.0 * M_PI * k * j / g->n) +
                            b * std::sin(2.0 * M_PI * k * j / g->n);
            }
            const double db = rng::gaussian(rng::derive_key(cfg.seed, 0x56414cULL, ctr++));
            const Field sh = stochastic_shift(f, db, ShiftMethod::spectral);
            iso = std::max(iso, std::abs(l2_norm(sh) - l2_norm(f)) / l2_norm(f));
            iso = std::max(iso,
                           std::abs(energy_J(sh) - energy_J(f)) / std::max(1.0, energy_J(f)));
            iso = std::max(iso, std::abs(mean(sh) - mean(f)) / std::abs(mean(f)));
        }
        std::snprintf(buf, sizeof buf, "max rel defect %.3g over 200 fields (tol 1e-12)", iso);
        add("shift isometry (norms, mass)", iso <= 1e-12, buf);

        // bridge refinement preserves coarse knots bitwise
        const WienerPath coarse = path_for_replica(cfg, 0);
        const WienerPath fine = refine(coarse);
        bool knots_ok = fine.times.size() == 2 * coarse.times.size() - 1;
        for (std::size_t i = 0; knots_ok && i < coarse.times.size(); ++i)
            knots_ok = fine.times[2 * i] == coarse.times[i] &&
                       fine.values[2 * i] == coarse.values[i];
        add("bridge keeps coarse knots", knots_ok, knots_ok ? "bitwise equal" : "mismatch");

        // seamless continuation
        const WienerPath ext =
            sample_path(rng::derive_key(cfg.seed, 0x434f4e54ULL, 1), 0.5 * cfg.T, cfg.N_plus_1);
        const Trajectory t2 = continue_run(t, 0.5 * cfg.T, ext);
        double drift2 = 0.0, rise2 = 0.0;
        for (std::size_t k = 1; k < t2.diagnostics.size(); ++k) {
            const auto& r = t2.diagnostics[k];
            drift2 = std::max(drift2, std::abs(r.mass - t2.diagnostics.front().mass) /
                                          std::abs(t2.diagnostics.front().mass));
            rise2 = std::max(rise2, r.energy_J - t2.diagnostics[k - 1].energy_J);
        }
        const bool seam_ok =
            drift2 < 1e-10 && rise2 <= 1e-10 * t2.diagnostics.front().energy_J &&
            t2.times.back() > t.times.back();
        std::snprintf(buf, sizeof buf, "drift %.3g, max J rise %.3g over extended run", drift2,
                      rise2);
        add("seamless continuation", seam_ok, buf);
    } catch (const SimError& e) {
        add("invariant suite execution", false, std::string("raised: ") + e.what());
    }

    bool all = true;
    for (const auto& r : rows) {
        all = all && r.pass;
        if (!quiet)
            std::printf("[%s] %-30s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                        r.detail.c_str());
    }
    if (!quiet) std::printf("%s\n", all ? "all checks passed" : "some checks FAILED");
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic thin-film equation simulator (periodic 1-D, "
                 "entropy-stable splitting scheme)"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::uint64_t seed_override = 0;
    bool quiet = false;
    auto* config_opt = app.add_option("--config", config_path, "flat key = value config file");
    auto* seed_opt = app.add_option("--seed", seed_override, "override the base RNG seed");
    auto* out_opt = app.add_option("--out", out_override, "override the output directory");
    app.add_flag("--quiet", quiet, "suppress console output");

    auto* sim = app.add_subcommand("simulate",
                                   "run one noise path; write trajectory CSV and snapshots");
    auto* ens = app.add_subcommand("ensemble", "run an ensemble of independent noise paths");
    auto* csp = app.add_subcommand("converge-split",
                                   "self-convergence in the number of splitting intervals");
    auto* cep = app.add_subcommand("converge-eps",
                                   "trajectory gaps across a decreasing epsilon sweep");
    auto* dft = app.add_subcommand("decay-fit",
                                   "least-squares decay rate from a stored trajectory CSV");
    std::string fit_csv;
    double t_start = -1.0;
    dft->add_option("csv", fit_csv, "trajectory CSV file")->required();
    dft->add_option("--t-start", t_start, "fit window start (default: 0.1 * final time)");
    auto* val =
        app.add_subcommand("validate", "run the invariant suite on a small grid, print a table");
    for (CLI::App* s : {sim, ens, csp, cep, dft, val}) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e); // prints help or the error + usage hint
        return rc == 0 ? 0 : 2;
    }

    RunConfig cfg;
    try {
        if (config_opt->count()) cfg = parse_config_file(config_path);
        if (seed_opt->count()) cfg.seed = seed_override;
        if (out_opt->count()) cfg.output_dir = out_override;
    } catch (const SimError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(cfg, quiet);
        if (ens->parsed()) return cmd_ensemble(cfg, quiet);
        if (csp->parsed()) return cmd_converge_split(cfg, quiet);
        if (cep->parsed()) return cmd_converge_eps(cfg, quiet);
        if (dft->parsed()) return cmd_decay_fit(fit_csv, t_start, quiet);
        if (val->parsed()) return cmd_validate(cfg, quiet);
    } catch (const SimError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}

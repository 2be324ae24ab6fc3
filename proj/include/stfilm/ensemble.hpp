#pragma once

/// @file ensemble.hpp
/// @brief Run configuration, single runs, parallel Monte Carlo ensembles
///        over independent noise paths, and the epsilon sweep.
///
/// Reproducibility contract: every output is a deterministic function of the
/// configuration (including the base seed). Replica r draws its path from
/// derive_key(seed, replica-stream, r), work is distributed dynamically, and
/// aggregation reduces in replica-index order — so results are identical for
/// any thread count.

#include <cstdint>
#include <string>
#include <vector>

#include "stfilm/splitting.hpp"
#include "stfilm/wiener.hpp"

namespace stfilm {

enum class InitialCondition { constant, sine_bump, gaussian_bump, from_file };

struct RunConfig {
    // grid
    double L = 1.0;
    int n = 128;
    // splitting
    double T = 1.0;
    int N_plus_1 = 64;
    double epsilon = 1e-2;
    double theta = 0.3;
    int record_every = 1;
    std::uint64_t seed = 12345;
    ShiftMethod shift_method = ShiftMethod::spectral;
    DetStepConfig det; // det.dt_internal <= 0 resolves to delta/4 at run time
    // initial condition
    InitialCondition initial_condition = InitialCondition::sine_bump;
    double amplitude = 0.3;
    double mean_level = 1.0;
    std::string initial_file; // snapshot file, used by from_file
    // ensemble / sweep / outputs
    std::string output_dir = "out";
    int ensemble_size = 1;
    std::vector<double> epsilon_sweep_values; // strictly decreasing when set
    int n_doublings = 3;
    double decay_tol = 1e-3; // sup_dev threshold counted as "decayed"
    int threads = 0;         // 0: STFILM_THREADS env, else hardware concurrency
};

/// Flat `key = value` text; '#' starts a comment; unknown keys are errors.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);
/// Emits every key; parse_config_text(config_to_text(c)) == c.
std::string config_to_text(const RunConfig& cfg);

SplittingConfig to_splitting_config(const RunConfig& cfg);

/// Builds the grid and initial profile. from_file loads a snapshot and uses
/// the snapshot's own grid. Throws NegativeInitialData if min < 0.
Field build_initial_condition(const RunConfig& cfg);

/// The noise path replica `r` integrates against (path seed
/// derive_key(cfg.seed, replica-stream, r), knots on the delta-grid).
WienerPath path_for_replica(const RunConfig& cfg, int replica);

/// One path (replica 0), no file output. ensemble_size is ignored.
Trajectory run_single(const RunConfig& cfg);

struct EnsembleStats {
    std::vector<double> times;
    std::vector<double> J_mean, J_q05, J_q95; // pathwise energy statistics
    std::vector<double> supdev_mean, supdev_max;
    std::vector<double> fraction_decayed; // share of paths with sup_dev < decay_tol
    std::vector<int> failed_replicas;     // indices whose run raised SimError
    int completed = 0;
};

/// Deterministic index-order reduction over completed per-path records.
/// Quantiles are nearest-rank. All paths must share the record time grid.
EnsembleStats aggregate(const std::vector<std::vector<DiagnosticsRecord>>& per_path,
                        double decay_tol);

/// Runs cfg.ensemble_size independent paths (worker threads resolve from
/// cfg.threads / STFILM_THREADS / hardware), writes path_NNN.csv per replica,
/// ensemble.csv with the aggregate, and config.txt to cfg.output_dir.
/// Throws SimError if more than 10% of paths fail.
EnsembleStats run_ensemble(const RunConfig& cfg);

struct EpsilonSweepEntry {
    double epsilon;
    double min_floor;   // min over records of min_u
    double decay_rate;  // fitted decay rate (NaN when the fit is impossible)
    double correction;  // sqrt(eps) * K_eps * final cum_d2
};

struct EpsilonSweepReport {
    std::vector<EpsilonSweepEntry> entries;         // one per epsilon, given order
    std::vector<double> gaps; // sup-norm trajectory gap between consecutive entries
};

/// Runs the same path once per epsilon in cfg.epsilon_sweep_values
/// (strictly decreasing required) and reports floors, rates, correction
/// terms, and pairwise trajectory gaps. No file output.
EpsilonSweepReport epsilon_sweep(const RunConfig& cfg);

} // namespace stfilm

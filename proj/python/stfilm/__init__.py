"""Stochastic thin-film equation simulator (periodic 1-D torus).

Thin wrapper over the compiled extension: stochastic transport noise via
exact random translation, entropy-stable implicit half-steps, Monte Carlo
ensembles with reproducible seeding.
"""

from ._core import (
    DiagnosticsRecord,
    EnsembleStats,
    Field,
    RunConfig,
    SimError,
    Telemetry,
    Trajectory,
    __version__,
    build_initial_condition,
    config_to_text,
    decay_fit,
    energy_J,
    k_epsilon,
    max_value,
    mean,
    min_value,
    parse_config_file,
    parse_config_text,
    read_trajectory_csv,
    run_ensemble,
    run_single,
    sobolev_constant,
    stochastic_shift,
    sup_deviation,
)

__all__ = [
    "DiagnosticsRecord",
    "EnsembleStats",
    "Field",
    "RunConfig",
    "SimError",
    "Telemetry",
    "Trajectory",
    "__version__",
    "build_initial_condition",
    "config_to_text",
    "decay_fit",
    "energy_J",
    "k_epsilon",
    "max_value",
    "mean",
    "min_value",
    "parse_config_file",
    "parse_config_text",
    "read_trajectory_csv",
    "run_ensemble",
    "run_single",
    "sobolev_constant",
    "stochastic_shift",
    "sup_deviation",
]

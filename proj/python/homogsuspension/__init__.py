"""Effective tensors and epsilon sweeps for periodic magnetizable suspensions."""

from ._homog import (
    ConfigError,
    InvariantError,
    SolveError,
    canonical_config,
    cell_tensors,
    config_hash,
    run_experiment,
)

__all__ = [
    "ConfigError",
    "InvariantError",
    "SolveError",
    "canonical_config",
    "cell_tensors",
    "config_hash",
    "run_experiment",
]

"""Bayesian inference of sparse stochastic dynamical networks."""

from ._core import (
    ArgumentError,
    ConfigError,
    DataError,
    DomainError,
    Error,
    GenerationError,
    GridError,
    NumericError,
    binary_metrics,
    bridge_covariance,
    build_grid,
    infer,
    kernel_matrix,
    ranked_metrics,
    run_cli,
    simulate,
)

__all__ = [
    "ArgumentError",
    "ConfigError",
    "DataError",
    "DomainError",
    "Error",
    "GenerationError",
    "GridError",
    "NumericError",
    "binary_metrics",
    "bridge_covariance",
    "build_grid",
    "infer",
    "kernel_matrix",
    "ranked_metrics",
    "run_cli",
    "simulate",
]

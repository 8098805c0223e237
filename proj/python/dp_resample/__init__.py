"""Differentially private confidence intervals by subsampling."""

from ._core import (
    ConfigError,
    DomainError,
    Error,
    IoError,
    ParameterError,
    PlanError,
    amplify,
    bootstrap_ci,
    calibrate,
    expmech_median_ci,
    inverse_sensitivity_median,
    median,
    run_cdf,
    run_coverage,
    run_nonprivate_subsampling,
    run_privsub,
    sample,
    sample_splitting_ci,
    true_mean,
    true_quantile,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "Error",
    "IoError",
    "ParameterError",
    "PlanError",
    "amplify",
    "bootstrap_ci",
    "calibrate",
    "expmech_median_ci",
    "inverse_sensitivity_median",
    "median",
    "run_cdf",
    "run_coverage",
    "run_nonprivate_subsampling",
    "run_privsub",
    "sample",
    "sample_splitting_ci",
    "true_mean",
    "true_quantile",
]

"""Divide-and-conquer posterior sampling with Wasserstein combination."""

from ._lswasp import (
    IoError,
    NumericalError,
    ValidationError,
    __version__,
    approximation_error,
    barycenter_cov,
    bures_distance,
    combine,
    computational_gain,
    effective_sample_size,
    fit_subsets,
    gaussian_w2,
    partition,
    psd_sqrt,
    run_experiment,
    sample_posterior,
    simulate,
)

__all__ = [
    "IoError",
    "NumericalError",
    "ValidationError",
    "__version__",
    "approximation_error",
    "barycenter_cov",
    "bures_distance",
    "combine",
    "computational_gain",
    "effective_sample_size",
    "fit_subsets",
    "gaussian_w2",
    "partition",
    "psd_sqrt",
    "run_experiment",
    "sample_posterior",
    "simulate",
]

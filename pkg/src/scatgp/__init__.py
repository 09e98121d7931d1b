"""Wavelet-scattering image features coupled to Gaussian-process heads.

A fixed, analytic feature extractor (translation-invariant, deformation-
and noise-stable scattering coefficients) feeds exact or variational GP
regression for uncertainty-aware prediction and pool-based Bayesian
optimization.
"""

from .bayesopt import BOConfig, BOTrace, expected_improvement, random_search, run_bo
from .datasets import (SynthSpec, config_digest, from_preset, read_cache,
                       read_manifest, synth_generate, write_cache, write_manifest)
from .features import (FeatureStandardizer, PCAProjector, fit_standardizer,
                       pca_fit)
from .filterbank import (FilterBank, FilterBankConfig, build_filterbank,
                         littlewood_paley_report, littlewood_paley_sum)
from .gp import (GPState, OptimizerConfig, PredictiveDistribution, TargetStats,
                 fit, log_marginal_likelihood, predict)
from .kernels import KernelSpec, kernel_gradients, kernel_matrix, make_spec
from .metrics import MetricsReport, compute_metrics, trivial_baseline
from .scattering import (FeatureVector, Path, ScatteringConfig, count_features,
                         enumerate_paths, scatter, scatter_batch, stack_features)

__version__ = "0.1.0"

__all__ = [
    "BOConfig", "BOTrace", "expected_improvement", "random_search", "run_bo",
    "SynthSpec", "config_digest", "from_preset", "read_cache", "read_manifest",
    "synth_generate", "write_cache", "write_manifest",
    "FeatureStandardizer", "PCAProjector", "fit_standardizer", "pca_fit",
    "FilterBank", "FilterBankConfig", "build_filterbank",
    "littlewood_paley_report", "littlewood_paley_sum",
    "GPState", "OptimizerConfig", "PredictiveDistribution", "TargetStats",
    "fit", "log_marginal_likelihood", "predict",
    "KernelSpec", "kernel_gradients", "kernel_matrix", "make_spec",
    "MetricsReport", "compute_metrics", "trivial_baseline",
    "FeatureVector", "Path", "ScatteringConfig", "count_features",
    "enumerate_paths", "scatter", "scatter_batch", "stack_features",
    "__version__",
]

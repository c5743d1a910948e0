"""Bayesian optimization with exact, derivative-aware and sparse GP surrogates."""

from .acquisition import (
    expected_improvement,
    probability_of_improvement,
    upper_confidence_bound,
)
from .benchmarks import BENCHMARKS, BenchmarkFn, get_benchmark, simple_regret
from .dataset import Dataset
from .direct import maximize
from .engine import Campaign
from .gp import GaussianProcess, NumericalFailure, PRESETS, fit_hyperparams
from .gpd import DerivativeGaussianProcess
from .kernels import KernelFamily, KernelSpec, se_spec
from .meta_model import PolynomialKernelGP, degree_posterior
from .sparse_fic import InducingMode, InducingSet, SparseDerivativeGP, select_inducing
from .sparse_spectrum import (
    SparseSpectrumGP,
    SpectrumBasis,
    fit_rssgp,
    gmd_ei_proxy,
    gmd_smc,
    gmd_thompson,
    optimize_frequencies,
    sample_frequencies_se,
)

__version__ = "0.1.0"

__all__ = [
    "BENCHMARKS",
    "BenchmarkFn",
    "Campaign",
    "Dataset",
    "DerivativeGaussianProcess",
    "GaussianProcess",
    "InducingMode",
    "InducingSet",
    "KernelFamily",
    "KernelSpec",
    "NumericalFailure",
    "PRESETS",
    "PolynomialKernelGP",
    "SparseDerivativeGP",
    "SparseSpectrumGP",
    "SpectrumBasis",
    "degree_posterior",
    "expected_improvement",
    "fit_hyperparams",
    "fit_rssgp",
    "get_benchmark",
    "gmd_ei_proxy",
    "gmd_smc",
    "gmd_thompson",
    "maximize",
    "optimize_frequencies",
    "probability_of_improvement",
    "sample_frequencies_se",
    "se_spec",
    "select_inducing",
    "simple_regret",
    "upper_confidence_bound",
]

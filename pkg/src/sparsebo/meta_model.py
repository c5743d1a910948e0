"""Polynomial-kernel GP meta-model and Bayesian degree estimation.

A GP with polynomial kernel (GPPK) is fitted to the raw observations to
capture the coarse shape of the objective.  The analytic gradient of its
posterior mean provides synthetic derivative observations for the main
SE-kernel GP; the polynomial degree is inferred from a truncated
geometric prior times the GPPK marginal likelihood.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve

from .gp import NumericalFailure, _chol_with_jitter
from .kernels import KernelFamily, KernelSpec, kernel_matrix
from .validation import check_array, check_X_y

DEFAULT_OFFSET = 0.5**2  # kernel offset sigma_0 = 0.5
DEFAULT_Q = 0.5
DEFAULT_MAX_DEGREE = 10


class PolynomialKernelGP:
    """GP regressor with the dot-product polynomial kernel."""

    def __init__(self, degree: int, offset: float = DEFAULT_OFFSET, noise_variance: float = 1e-6):
        if degree < 1:
            raise ValueError("degree must be >= 1")
        self.degree = degree
        self.offset = offset
        self.noise_variance = noise_variance

    def get_params(self) -> dict:
        return {
            "degree": self.degree,
            "offset": self.offset,
            "noise_variance": self.noise_variance,
        }

    def _spec(self, dim: int) -> KernelSpec:
        return KernelSpec(
            KernelFamily.POLYNOMIAL,
            np.ones(dim),
            poly_degree=self.degree,
            poly_offset=self.offset,
        )

    def fit(self, X, y) -> "PolynomialKernelGP":
        X, y = check_X_y(X, y)
        spec = self._spec(X.shape[1])
        K = kernel_matrix(spec, X) + self.noise_variance * np.eye(len(y))
        scale = max(1.0, float(np.max(np.abs(np.diag(K)))))
        L, _ = _chol_with_jitter(K, scale)
        self.X_ = X
        self.y_ = y
        self.L_ = L
        self.alpha_ = cho_solve((L, True), y)
        self.log_marginal_ = float(
            -0.5 * y @ self.alpha_
            - np.sum(np.log(np.diag(L)))
            - 0.5 * len(y) * np.log(2 * np.pi)
        )
        return self

    def predict(self, X) -> np.ndarray:
        X = check_array(X)
        spec = self._spec(X.shape[1])
        return kernel_matrix(spec, X, self.X_) @ self.alpha_

    def estimate_derivatives(self, X) -> np.ndarray:
        """Analytic gradient of the posterior mean at each row of X."""
        X = check_array(X)
        base = self.offset + X @ self.X_.T  # (n, t)
        w = self.degree * base ** (self.degree - 1) * self.alpha_[None, :]
        return w @ self.X_


@dataclass
class DegreePosterior:
    """Discrete posterior over polynomial degrees."""

    support: np.ndarray
    log_prior: np.ndarray
    log_like: np.ndarray
    posterior: np.ndarray
    mode: int


def truncated_geometric_log_prior(q: float, n_max: int) -> np.ndarray:
    if not 0 < q < 1:
        raise ValueError("q must lie in (0, 1)")
    d = np.arange(1, n_max + 1)
    logp = (d - 1) * np.log(1 - q) + np.log(q)
    return logp - np.log(np.sum(np.exp(logp)))


def degree_posterior_from_loglikes(
    log_like: np.ndarray, q: float = DEFAULT_Q
) -> DegreePosterior:
    log_like = np.asarray(log_like, dtype=float)
    n_max = len(log_like)
    log_prior = truncated_geometric_log_prior(q, n_max)
    unnorm = log_prior + log_like
    if np.all(np.isneginf(unnorm)):
        raise NumericalFailure("every candidate degree failed to fit")
    shifted = unnorm - np.max(unnorm[np.isfinite(unnorm)])
    post = np.exp(shifted)
    post[~np.isfinite(post)] = 0.0
    post /= post.sum()
    # argmax returns the first maximum, i.e. ties break toward smaller degree
    mode = int(np.argmax(post)) + 1
    return DegreePosterior(np.arange(1, n_max + 1), log_prior, log_like, post, mode)


def degree_posterior(
    X,
    y,
    q: float = DEFAULT_Q,
    n_max: int = DEFAULT_MAX_DEGREE,
    offset: float = DEFAULT_OFFSET,
    noise_variance: float = 1e-6,
) -> DegreePosterior:
    """Posterior over degrees 1..n_max given the observed data."""
    X, y = check_X_y(X, y)
    log_like = np.full(n_max, -np.inf)
    for deg in range(1, n_max + 1):
        try:
            model = PolynomialKernelGP(deg, offset, noise_variance).fit(X, y)
            log_like[deg - 1] = model.log_marginal_
        except NumericalFailure:
            continue
    return degree_posterior_from_loglikes(log_like, q)


def fit_gppk_with_estimated_degree(
    X,
    y,
    q: float = DEFAULT_Q,
    n_max: int = DEFAULT_MAX_DEGREE,
    offset: float = DEFAULT_OFFSET,
    noise_variance: float = 1e-6,
) -> tuple[PolynomialKernelGP, DegreePosterior]:
    post = degree_posterior(X, y, q, n_max, offset, noise_variance)
    model = PolynomialKernelGP(post.mode, offset, noise_variance).fit(X, y)
    return model, post

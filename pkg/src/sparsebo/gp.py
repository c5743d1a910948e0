"""Exact Gaussian-process regression with optional per-point noise."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, cholesky
from scipy.optimize import minimize

from .kernels import JITTER, KernelFamily, KernelSpec, kernel_diag, kernel_matrix, se_spec
from .validation import check_array, check_X_y


class NumericalFailure(RuntimeError):
    """Covariance factorization failed even after jitter escalation."""


# Kernel/noise presets used by the experiment harness.  Each preset names
# the default hyperparameters of one family of experiments.
PRESETS = {
    "meta-model": dict(lengthscale=0.1, signal_variance=1.0, noise_variance=0.01**2),
    "sparse-derivative": dict(lengthscale=0.8, signal_variance=1.0, noise_variance=0.01**2),
    "sparse-spectrum": dict(lengthscale=0.5, signal_variance=2.0, noise_variance=0.01**2),
}


class ClampCounter:
    """Counts how often predictive variances were clamped at zero."""

    def __init__(self):
        self.count = 0

    def clamp(self, var: np.ndarray) -> np.ndarray:
        neg = var < 0
        if np.any(neg):
            self.count += int(np.sum(neg))
            var = np.where(neg, 0.0, var)
        return var


variance_clamps = ClampCounter()


def _chol_with_jitter(C: np.ndarray, scale: float):
    """Cholesky factor of C, escalating diagonal jitter when needed."""
    for jitter in (0.0, JITTER * scale, 1e-6 * scale, 1e-4 * scale):
        try:
            return cholesky(C + jitter * np.eye(len(C)), lower=True), jitter
        except np.linalg.LinAlgError:
            continue
    cond = np.linalg.cond(C)
    raise NumericalFailure(
        f"covariance matrix is not positive definite (condition number {cond:.3e})"
    )


class GaussianProcess:
    """Exact GP regressor.

    Parameters
    ----------
    spec : KernelSpec
        Kernel configuration.
    noise_variance : float
        Shared observation noise, used when no per-point vector is given.
    """

    def __init__(self, spec: KernelSpec, noise_variance: float = 0.01**2):
        self.spec = spec
        self.noise_variance = noise_variance

    def get_params(self) -> dict:
        return {"spec": self.spec, "noise_variance": self.noise_variance}

    def set_params(self, **params) -> "GaussianProcess":
        for k, v in params.items():
            if not hasattr(self, k):
                raise ValueError(f"unknown parameter {k}")
            setattr(self, k, v)
        return self

    def fit(self, X, y, noise_vars=None) -> "GaussianProcess":
        X, y = check_X_y(X, y)
        if noise_vars is None:
            noise_vars = np.full(len(y), self.noise_variance)
        else:
            noise_vars = np.asarray(noise_vars, dtype=float).ravel()
        K = kernel_matrix(self.spec, X) + np.diag(noise_vars)
        L, _ = _chol_with_jitter(K, self.spec.signal_variance)
        self.X_ = X
        self.y_ = y
        self.noise_vars_ = noise_vars
        self.L_ = L
        self.alpha_ = cho_solve((L, True), y)
        self.log_marginal_ = float(
            -0.5 * y @ self.alpha_
            - np.sum(np.log(np.diag(L)))
            - 0.5 * len(y) * np.log(2 * np.pi)
        )
        return self

    def predict(self, X, return_var: bool = False):
        X = check_array(X)
        Ks = kernel_matrix(self.spec, X, self.X_)
        mean = Ks @ self.alpha_
        if not return_var:
            return mean
        V = np.linalg.solve(self.L_, Ks.T)
        var = kernel_diag(self.spec, X) - np.sum(V * V, axis=0)
        return mean, variance_clamps.clamp(var)


def log_marginal(spec: KernelSpec, X, y, noise_vars=None, noise_variance=0.01**2) -> float:
    """Log marginal likelihood of y under the zero-mean GP prior plus noise."""
    gp = GaussianProcess(spec, noise_variance).fit(X, y, noise_vars)
    return gp.log_marginal_


def log_marginal_gradient(spec: KernelSpec, X, y, noise_variance: float) -> np.ndarray:
    """Gradient of the SE log marginal w.r.t. log hyperparameters.

    Order: log-lengthscales (one per dimension), log signal variance,
    log noise variance.
    """
    if spec.family != KernelFamily.SE:
        raise ValueError("analytic marginal-likelihood gradient implemented for SE only")
    X, y = check_X_y(X, y)
    K = kernel_matrix(spec, X)
    C = K + noise_variance * np.eye(len(y))
    L, _ = _chol_with_jitter(C, spec.signal_variance)
    alpha = cho_solve((L, True), y)
    Cinv = cho_solve((L, True), np.eye(len(y)))
    W = np.outer(alpha, alpha) - Cinv

    grads = []
    for l in range(spec.dim):
        D = (X[:, l][:, None] - X[:, l][None, :]) ** 2 / spec.lengthscales[l] ** 2
        grads.append(0.5 * np.sum(W * (K * D)))
    grads.append(0.5 * np.sum(W * K))  # d/d log sigma_f^2
    grads.append(0.5 * np.trace(W) * noise_variance)  # d/d log sigma_n^2
    return np.asarray(grads)


@dataclass
class FitResult:
    spec: KernelSpec
    noise_variance: float
    log_marginal: float
    converged: bool


def fit_hyperparams(
    spec0: KernelSpec,
    X,
    y,
    bounds=None,
    noise_variance: float = 0.01**2,
    fit_noise: bool = False,
    budget: int = 100,
    fixed: bool = False,
) -> FitResult:
    """Maximize the log marginal likelihood over SE hyperparameters.

    With ``fixed=True`` (the mode used by the optimization experiments)
    the initial spec is returned unchanged.  ``bounds`` is a list of
    (low, high) pairs in the natural parameter space per log-parameter
    group: lengthscales, signal variance and, if ``fit_noise``, noise.
    """
    lm0 = log_marginal(spec0, X, y, noise_variance=noise_variance)
    if fixed:
        return FitResult(spec0, noise_variance, lm0, True)
    if spec0.family != KernelFamily.SE:
        raise ValueError("hyperparameter fitting implemented for the SE kernel")

    d = spec0.dim
    theta0 = np.concatenate(
        [
            np.log(spec0.lengthscales),
            [np.log(spec0.signal_variance)],
            [np.log(noise_variance)] if fit_noise else [],
        ]
    )
    if bounds is None:
        bounds = [(1e-3, 1e3)] * d + [(1e-6, 1e6)] + ([(1e-10, 1e2)] if fit_noise else [])
    log_bounds = [(np.log(lo), np.log(hi)) for lo, hi in bounds]

    def unpack(theta):
        ls = np.exp(theta[:d])
        sf2 = np.exp(theta[d])
        sn2 = np.exp(theta[d + 1]) if fit_noise else noise_variance
        return spec0.with_params(lengthscales=ls, signal_variance=sf2), sn2

    def neg(theta):
        spec, sn2 = unpack(theta)
        try:
            val = log_marginal(spec, X, y, noise_variance=sn2)
            grad = log_marginal_gradient(spec, X, y, sn2)
        except NumericalFailure:
            return 1e12, np.zeros_like(theta)
        g = grad if fit_noise else grad[:-1]
        return -val, -g

    res = minimize(
        neg,
        theta0,
        jac=True,
        method="L-BFGS-B",
        bounds=log_bounds,
        options={"maxiter": budget},
    )
    spec, sn2 = unpack(res.x)
    lm = log_marginal(spec, X, y, noise_variance=sn2)
    if lm < lm0 - 1e-9:
        # Optimizer contract: never return something worse than the start.
        return FitResult(spec0, noise_variance, lm0, bool(res.success))
    return FitResult(spec, sn2, lm, bool(res.success))

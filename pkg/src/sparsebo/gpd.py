"""Exact GP conditioned jointly on function values and gradient observations."""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_solve

from .dataset import Dataset
from .gp import _chol_with_jitter, variance_clamps
from .kernels import (
    KernelSpec,
    augmented_gram,
    cross_value_grad,
    kernel_diag,
    kernel_matrix,
)
from .validation import check_array

# Default noise applied to the gradient block of the augmented system;
# gradient observations are treated as near-exact but need conditioning.
DERIV_NOISE = 1e-6


class DerivativeGaussianProcess:
    """GP regressor over function values plus gradient observations.

    The training covariance is the augmented Gram matrix over value rows
    and per-partial gradient rows.  With no gradient observations this is
    identical to the plain :class:`~sparsebo.gp.GaussianProcess`.
    """

    def __init__(
        self,
        spec: KernelSpec,
        noise_variance: float = 0.01**2,
        deriv_noise: float = DERIV_NOISE,
    ):
        self.spec = spec
        self.noise_variance = noise_variance
        self.deriv_noise = deriv_noise

    def get_params(self) -> dict:
        return {
            "spec": self.spec,
            "noise_variance": self.noise_variance,
            "deriv_noise": self.deriv_noise,
        }

    def fit_dataset(self, data: Dataset) -> "DerivativeGaussianProcess":
        Xg, G = data.gradient_arrays()
        return self.fit(data.X, data.y, Xg, G, noise_vars=data.noise_vars)

    def fit(self, X, y, grad_X=None, grad_values=None, noise_vars=None):
        X = check_array(X)
        y = np.asarray(y, dtype=float).ravel()
        d = X.shape[1]
        if grad_X is None or len(grad_X) == 0:
            grad_X = np.zeros((0, d))
            grad_values = np.zeros((0, d))
        grad_X = check_array(grad_X) if len(grad_X) else np.zeros((0, d))
        grad_values = (
            check_array(grad_values) if len(grad_values) else np.zeros((0, d))
        )
        if noise_vars is None:
            noise_vars = np.full(len(y), self.noise_variance)
        else:
            noise_vars = np.asarray(noise_vars, dtype=float).ravel()

        K = augmented_gram(self.spec, X, grad_X)
        noise = np.concatenate(
            [noise_vars, np.full(grad_X.shape[0] * d, self.deriv_noise)]
        )
        K = K + np.diag(noise)
        L, _ = _chol_with_jitter(K, self.spec.signal_variance)
        targets = np.concatenate([y, grad_values.ravel()])

        self.X_ = X
        self.grad_X_ = grad_X
        self.targets_ = targets
        self.L_ = L
        self.alpha_ = cho_solve((L, True), targets)
        self.log_marginal_ = float(
            -0.5 * targets @ self.alpha_
            - np.sum(np.log(np.diag(L)))
            - 0.5 * len(targets) * np.log(2 * np.pi)
        )
        return self

    def _cross(self, X: np.ndarray) -> np.ndarray:
        Ks = kernel_matrix(self.spec, X, self.X_)
        if self.grad_X_.shape[0]:
            Ks = np.hstack([Ks, cross_value_grad(self.spec, X, self.grad_X_)])
        return Ks

    def predict(self, X, return_var: bool = False):
        X = check_array(X)
        Ks = self._cross(X)
        mean = Ks @ self.alpha_
        if not return_var:
            return mean
        V = np.linalg.solve(self.L_, Ks.T)
        var = kernel_diag(self.spec, X) - np.sum(V * V, axis=0)
        return mean, variance_clamps.clamp(var)

    def predict_gradient(self, x) -> np.ndarray:
        """Gradient of the posterior mean at a single point."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        eps = 1e-6
        grad = np.empty(len(x))
        for g in range(len(x)):
            e = np.zeros_like(x)
            e[g] = eps
            hi = self.predict((x + e)[None, :])[0]
            lo = self.predict((x - e)[None, :])[0]
            grad[g] = (hi - lo) / (2 * eps)
        return grad

"""Covariance functions and their derivative cross-covariance blocks.

All surrogates in this package are built on three kernel families:
squared exponential (with per-dimension lengthscales), Matern 3/2 and
the polynomial dot-product kernel.  Only the squared exponential family
supports the gradient/Hessian blocks needed by derivative-augmented
models; requesting them for another family raises ``UnsupportedKernel``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

# Relative jitter added to Gram diagonals before factorization.
JITTER = 1e-8


class KernelFamily(str, Enum):
    SE = "se"
    MATERN32 = "matern32"
    POLYNOMIAL = "polynomial"


class UnsupportedKernel(ValueError):
    """Derivative blocks requested for a family that has none."""


@dataclass(frozen=True)
class KernelSpec:
    """Immutable kernel configuration.

    Parameters
    ----------
    family : KernelFamily
        Which covariance function to evaluate.
    lengthscales : array-like of shape (d,)
        Per-dimension characteristic lengthscales.  An isotropic kernel is
        expressed as a vector with equal entries; an infinite entry drops
        the corresponding dimension from the distance (ARD convention).
    signal_variance : float
        Kernel value at zero distance for the stationary families.
    poly_degree : int
        Degree of the polynomial kernel (ignored by stationary families).
    poly_offset : float
        Additive offset inside the polynomial kernel.
    """

    family: KernelFamily
    lengthscales: np.ndarray
    signal_variance: float = 1.0
    poly_degree: int = 1
    poly_offset: float = 0.0

    def __post_init__(self):
        ls = np.atleast_1d(np.asarray(self.lengthscales, dtype=float))
        object.__setattr__(self, "lengthscales", ls)
        if np.any(ls <= 0):
            raise ValueError("lengthscales must be positive")
        if self.signal_variance <= 0:
            raise ValueError("signal_variance must be positive")
        if self.poly_degree < 1:
            raise ValueError("poly_degree must be >= 1")
        if self.poly_offset < 0:
            raise ValueError("poly_offset must be nonnegative")

    @property
    def dim(self) -> int:
        return self.lengthscales.shape[0]

    def with_params(self, **kw) -> "KernelSpec":
        return replace(self, **kw)


def se_spec(lengthscale, signal_variance=1.0, dim=None) -> KernelSpec:
    """Convenience constructor for an (isotropic) SE kernel."""
    ls = np.atleast_1d(np.asarray(lengthscale, dtype=float))
    if dim is not None and ls.size == 1:
        ls = np.full(dim, ls[0])
    return KernelSpec(KernelFamily.SE, ls, signal_variance)


def _check_dim(spec: KernelSpec, X: np.ndarray):
    if X.shape[-1] != spec.dim:
        raise ValueError(
            f"points have dimension {X.shape[-1]}, kernel expects {spec.dim}"
        )


def _as_2d(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    return x


def _scaled_sqdist(spec: KernelSpec, X: np.ndarray, X2: np.ndarray) -> np.ndarray:
    # (x - x') / rho with rho = inf mapping to a zero contribution.
    inv = 1.0 / spec.lengthscales
    A = X * inv
    B = X2 * inv
    d2 = (
        np.sum(A * A, axis=1)[:, None]
        + np.sum(B * B, axis=1)[None, :]
        - 2.0 * A @ B.T
    )
    return np.maximum(d2, 0.0)


def kernel_matrix(spec: KernelSpec, X, X2=None) -> np.ndarray:
    """Gram (or cross) matrix k(X, X2) of shape (n, n2)."""
    X = _as_2d(X)
    X2 = X if X2 is None else _as_2d(X2)
    _check_dim(spec, X)
    _check_dim(spec, X2)
    if spec.family == KernelFamily.SE:
        return spec.signal_variance * np.exp(-0.5 * _scaled_sqdist(spec, X, X2))
    if spec.family == KernelFamily.MATERN32:
        r = np.sqrt(3.0 * _scaled_sqdist(spec, X, X2))
        return spec.signal_variance * (1.0 + r) * np.exp(-r)
    if spec.family == KernelFamily.POLYNOMIAL:
        return (spec.poly_offset + X @ X2.T) ** spec.poly_degree
    raise ValueError(f"unknown kernel family {spec.family}")


def kernel_eval(spec: KernelSpec, x, x2) -> float:
    """Single kernel evaluation k(x, x')."""
    return float(kernel_matrix(spec, _as_2d(x), _as_2d(x2))[0, 0])


def kernel_diag(spec: KernelSpec, X) -> np.ndarray:
    """Diagonal k(x_i, x_i) without forming the full matrix."""
    X = _as_2d(X)
    _check_dim(spec, X)
    if spec.family in (KernelFamily.SE, KernelFamily.MATERN32):
        return np.full(X.shape[0], spec.signal_variance)
    return (spec.poly_offset + np.sum(X * X, axis=1)) ** spec.poly_degree


def _require_se(spec: KernelSpec):
    if spec.family != KernelFamily.SE:
        raise UnsupportedKernel(
            f"derivative blocks are only defined for the SE kernel, got {spec.family}"
        )


def grad_block(spec: KernelSpec, x, x2) -> np.ndarray:
    """Vector of partials [d k(x, x') / d x'_g]_g for the SE kernel."""
    _require_se(spec)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    x2 = np.atleast_1d(np.asarray(x2, dtype=float))
    k = kernel_eval(spec, x, x2)
    delta = x - x2
    return k * delta / spec.lengthscales**2


def hess_block(spec: KernelSpec, x, x2) -> np.ndarray:
    """Matrix of mixed partials [d^2 k / d x_g d x'_h]_{g,h} for SE."""
    _require_se(spec)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    x2 = np.atleast_1d(np.asarray(x2, dtype=float))
    k = kernel_eval(spec, x, x2)
    inv2 = 1.0 / spec.lengthscales**2
    delta = (x - x2) * inv2
    return k * (np.diag(inv2) - np.outer(delta, delta))


def cross_value_grad(spec: KernelSpec, X, Xg) -> np.ndarray:
    """Cross-covariance between function values at X and gradients at Xg.

    Returns a matrix of shape (n, n0*d); column block j holds
    d k(x_i, xg_j) / d xg_j over the d partials of the j-th gradient point.
    """
    _require_se(spec)
    X = _as_2d(X)
    Xg = _as_2d(Xg)
    K = kernel_matrix(spec, X, Xg)  # (n, n0)
    inv2 = 1.0 / spec.lengthscales**2
    # delta[i, j, :] = x_i - xg_j
    delta = X[:, None, :] - Xg[None, :, :]
    blocks = K[:, :, None] * delta * inv2[None, None, :]
    n, n0, d = blocks.shape
    return blocks.reshape(n, n0 * d)


def cross_grad_grad(spec: KernelSpec, Xg, Xg2) -> np.ndarray:
    """Covariance between gradient observations at Xg and Xg2.

    Returns shape (n0*d, n0'*d); entry ((j,g),(j',h)) is
    d^2 k(xg_j, xg2_j') / d xg_{j,g} d xg2_{j',h}.
    """
    _require_se(spec)
    Xg = _as_2d(Xg)
    Xg2 = _as_2d(Xg2)
    K = kernel_matrix(spec, Xg, Xg2)
    inv2 = 1.0 / spec.lengthscales**2
    delta = (Xg[:, None, :] - Xg2[None, :, :]) * inv2[None, None, :]
    d = spec.dim
    eye = np.diag(inv2)
    # blocks[i, j, g, h] = K_ij * (inv2 diag - delta_g delta_h)
    blocks = K[:, :, None, None] * (
        eye[None, None, :, :] - delta[:, :, :, None] * delta[:, :, None, :]
    )
    n0, n02 = K.shape
    return blocks.transpose(0, 2, 1, 3).reshape(n0 * d, n02 * d)


def grad_diag(spec: KernelSpec, Xg) -> np.ndarray:
    """Diagonal of the gradient-gradient block, flattened to length n0*d."""
    _require_se(spec)
    Xg = _as_2d(Xg)
    inv2 = spec.signal_variance / spec.lengthscales**2
    return np.tile(inv2, Xg.shape[0])


def augmented_gram(spec: KernelSpec, X, Xg) -> np.ndarray:
    """Joint covariance of function values at X and gradients at Xg.

    Block layout: [[K_ff, K_fg], [K_fg^T, K_gg]] with the gradient rows
    ordered point-major (all d partials of the first gradient point first).
    """
    X = _as_2d(X)
    Xg = _as_2d(Xg) if Xg is not None and len(Xg) else np.zeros((0, spec.dim))
    K_ff = kernel_matrix(spec, X, X)
    if Xg.shape[0] == 0:
        return K_ff
    K_fg = cross_value_grad(spec, X, Xg)
    K_gg = cross_grad_grad(spec, Xg, Xg)
    top = np.hstack([K_ff, K_fg])
    bottom = np.hstack([K_fg.T, K_gg])
    return np.vstack([top, bottom])

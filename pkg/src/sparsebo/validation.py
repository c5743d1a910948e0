"""Input validation helpers shared by the estimators."""

from __future__ import annotations

import numpy as np


def check_array(X, name="X", ndim=2) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1 and ndim == 2:
        X = X[:, None]
    if X.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite values")
    return X


def check_X_y(X, y):
    X = check_array(X, "X")
    y = np.asarray(y, dtype=float).ravel()
    if len(y) != X.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has {len(y)} entries")
    if not np.all(np.isfinite(y)):
        raise ValueError("y contains non-finite values")
    return X, y


def check_bounds(bounds) -> np.ndarray:
    """Validate a (d, 2) array of [lower, upper] box bounds."""
    b = np.asarray(bounds, dtype=float)
    if b.ndim != 2 or b.shape[1] != 2:
        raise ValueError(f"bounds must have shape (d, 2), got {b.shape}")
    if np.any(b[:, 0] >= b[:, 1]):
        raise ValueError("each lower bound must be strictly below its upper bound")
    return b


def in_bounds(x, bounds) -> bool:
    b = check_bounds(bounds)
    x = np.asarray(x, dtype=float).ravel()
    return bool(np.all(x >= b[:, 0]) and np.all(x <= b[:, 1]))

"""Observation container shared by all surrogate models."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .validation import check_array, check_X_y


@dataclass
class Dataset:
    """Observed inputs, values and optional gradients / per-point noise.

    ``gradients`` maps a point index into ``X`` to the observed (or
    estimated) gradient vector at that input.  Gradients at locations that
    are not function observations can be supplied through ``extra_grad_X``
    / ``extra_grad_values``.
    """

    X: np.ndarray
    y: np.ndarray
    noise_vars: np.ndarray | None = None
    gradients: dict[int, np.ndarray] = field(default_factory=dict)
    extra_grad_X: np.ndarray | None = None
    extra_grad_values: np.ndarray | None = None

    def __post_init__(self):
        self.X, self.y = check_X_y(self.X, self.y)
        if self.noise_vars is not None:
            nv = np.asarray(self.noise_vars, dtype=float).ravel()
            if len(nv) != len(self.y):
                raise ValueError("noise_vars length must match y")
            if np.any(nv < 0):
                raise ValueError("noise_vars must be nonnegative")
            self.noise_vars = nv
        d = self.X.shape[1]
        for i, g in self.gradients.items():
            g = np.asarray(g, dtype=float).ravel()
            if len(g) != d:
                raise ValueError(f"gradient at index {i} has length {len(g)}, expected {d}")
            self.gradients[i] = g
        if self.extra_grad_X is not None:
            self.extra_grad_X = check_array(self.extra_grad_X, "extra_grad_X")
            G = check_array(self.extra_grad_values, "extra_grad_values")
            if G.shape != self.extra_grad_X.shape:
                raise ValueError("extra_grad_values shape must match extra_grad_X")
            self.extra_grad_values = G

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def noise_vector(self, default: float) -> np.ndarray:
        if self.noise_vars is not None:
            return self.noise_vars.copy()
        return np.full(self.n, default)

    def gradient_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """All gradient observations as (locations, values) arrays."""
        Xg, G = [], []
        for i in sorted(self.gradients):
            Xg.append(self.X[i])
            G.append(self.gradients[i])
        if self.extra_grad_X is not None:
            Xg.extend(self.extra_grad_X)
            G.extend(self.extra_grad_values)
        if not Xg:
            return np.zeros((0, self.dim)), np.zeros((0, self.dim))
        return np.asarray(Xg), np.asarray(G)

    def has_gradients(self) -> bool:
        return bool(self.gradients) or (
            self.extra_grad_X is not None and len(self.extra_grad_X) > 0
        )

"""Acquisition functions over any fitted surrogate posterior."""

from __future__ import annotations

import numpy as np
from scipy.stats import norm


def expected_improvement(mean, var, incumbent):
    """Analytic EI for maximization; zero wherever the posterior is exact."""
    mean = np.asarray(mean, dtype=float)
    sigma = np.sqrt(np.maximum(np.asarray(var, dtype=float), 0.0))
    out = np.zeros_like(mean)
    pos = sigma > 0
    z = (mean[pos] - incumbent) / sigma[pos]
    out[pos] = (mean[pos] - incumbent) * norm.cdf(z) + sigma[pos] * norm.pdf(z)
    return np.maximum(out, 0.0)


def probability_of_improvement(mean, var, incumbent, xi=0.0):
    if xi < 0:
        raise ValueError("exploration bias must be nonnegative")
    mean = np.asarray(mean, dtype=float)
    sigma = np.sqrt(np.maximum(np.asarray(var, dtype=float), 0.0))
    out = np.where(mean > incumbent + xi, 1.0, 0.0)
    pos = sigma > 0
    out = np.asarray(out, dtype=float)
    out[pos] = norm.cdf((mean[pos] - incumbent - xi) / sigma[pos])
    return out


def upper_confidence_bound(mean, var, tau=2.0):
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    mean = np.asarray(mean, dtype=float)
    sigma = np.sqrt(np.maximum(np.asarray(var, dtype=float), 0.0))
    return mean + tau * sigma


def ucb_schedule(t: int, dim: int) -> float:
    """Sublinear confidence schedule; grows like sqrt(log t)."""
    return float(np.sqrt(2.0 * np.log(max(t, 2) ** (dim / 2 + 2) * np.pi**2 / 0.3)))


def make_acquisition(kind: str, incumbent: float, xi: float = 0.0, tau: float = 2.0):
    """Build acq(mean, var) -> values for the named acquisition."""
    kind = kind.lower()
    if kind == "ei":
        return lambda mean, var: expected_improvement(mean, var, incumbent)
    if kind == "pi":
        return lambda mean, var: probability_of_improvement(mean, var, incumbent, xi)
    if kind == "ucb":
        return lambda mean, var: upper_confidence_bound(mean, var, tau)
    raise ValueError(f"unknown acquisition kind {kind!r}")

"""Ask/tell campaign state machine over interchangeable BO strategies.

A campaign owns the bounds, the observation set, a strategy name and a
seed.  Every mutation is appended to an event log, and replaying that
log from the initial configuration reproduces the campaign state
exactly; randomness at step t is always drawn from a generator keyed on
(seed, t), so persistence and determinism come for free.
"""

from __future__ import annotations

import json
import uuid
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from . import direct
from .acquisition import make_acquisition, ucb_schedule
from .gp import GaussianProcess, NumericalFailure, PRESETS
from .gpd import DerivativeGaussianProcess
from .kernels import se_spec
from .meta_model import fit_gppk_with_estimated_degree
from .sparse_fic import InducingMode, SparseDerivativeGP, select_inducing
from .sparse_spectrum import (
    SparseSpectrumGP,
    fit_rssgp,
    optimize_frequencies,
    sample_frequencies_se,
)
from .validation import check_bounds, in_bounds

SCHEMA_VERSION = 1

STRATEGIES = ("StandardBO", "BOTD", "BODMM", "BOSGPD", "SSGP-BO", "RSSGP-BO")
_ALIASES = {
    "standard": "StandardBO",
    "botd": "BOTD",
    "bodmm": "BODMM",
    "bosgpd": "BOSGPD",
    "ssgp": "SSGP-BO",
    "rssgp": "RSSGP-BO",
}

_STRATEGY_PRESET = {
    "StandardBO": "meta-model",
    "BOTD": "meta-model",
    "BODMM": "meta-model",
    "BOSGPD": "sparse-derivative",
    "SSGP-BO": "sparse-spectrum",
    "RSSGP-BO": "sparse-spectrum",
}


class PendingSuggestionExists(RuntimeError):
    """ask() called while a suggestion is already outstanding."""


class NoPendingSuggestion(RuntimeError):
    """tell() called with nothing pending and no out-of-band flag."""


def canonical_strategy(name: str) -> str:
    if name in STRATEGIES:
        return name
    low = name.lower().replace("-bo", "").replace("_", "")
    if low in _ALIASES:
        return _ALIASES[low]
    raise ValueError(f"unknown strategy {name!r}; known: {STRATEGIES}")


@dataclass
class Observation:
    x: np.ndarray
    y: float
    grad: np.ndarray | None = None
    noise_var: float = 0.01**2

    def to_dict(self) -> dict:
        d = {"x": list(map(float, self.x)), "y": self.y, "noise_var": self.noise_var}
        if self.grad is not None:
            d["grad"] = list(map(float, self.grad))
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Observation":
        grad = np.asarray(d["grad"], dtype=float) if "grad" in d else None
        return cls(
            np.asarray(d["x"], dtype=float),
            float(d["y"]),
            grad,
            float(d.get("noise_var", 0.01**2)),
        )


class Campaign:
    """Persistent sequential-optimization state with ask/tell semantics."""

    def __init__(
        self,
        id: str,
        bounds,
        sense: str,
        strategy: str,
        model_config: dict,
        seed: int,
        observations: list[Observation] | None = None,
        log: list[dict] | None = None,
        extra: dict | None = None,
    ):
        self.id = id
        self.bounds = check_bounds(bounds)
        if sense not in ("min", "max"):
            raise ValueError("sense must be 'min' or 'max'")
        self.sense = sense
        self.strategy = canonical_strategy(strategy)
        self.model_config = dict(model_config or {})
        self.seed = int(seed)
        self.observations = list(observations or [])
        self.log = list(log or [])
        self._extra = dict(extra or {})
        self.pending = self._replay_pending()
        self.last_ask_fallback = bool(
            self.log and self.log[-1].get("type") == "ask" and self.log[-1].get("fallback")
        )

    @classmethod
    def new(cls, bounds, sense="max", strategy="StandardBO", seed=0, model_config=None, id=None):
        return cls(id or uuid.uuid4().hex[:12], bounds, sense, strategy, model_config, seed)

    # -- basic state ----------------------------------------------------

    @property
    def dim(self) -> int:
        return self.bounds.shape[0]

    @property
    def n_init(self) -> int:
        return int(self.model_config.get("n_init", self.dim + 1))

    def _replay_pending(self):
        pending = None
        for e in self.log:
            if e["type"] == "ask":
                pending = np.asarray(e["x"], dtype=float)
            elif e["type"] == "tell" and not e.get("out_of_band"):
                pending = None
        return pending

    def _ask_count(self) -> int:
        return sum(1 for e in self.log if e["type"] == "ask")

    def _rng(self, t: int) -> np.random.Generator:
        return np.random.default_rng((self.seed, t))

    @property
    def incumbent(self):
        """(x, y) of the best observation, or None before any tell."""
        if not self.observations:
            return None
        ys = np.array([o.y for o in self.observations])
        i = int(np.argmax(ys) if self.sense == "max" else np.argmin(ys))
        return self.observations[i].x, self.observations[i].y

    @property
    def incumbent_value(self) -> float:
        inc = self.incumbent
        if inc is None:
            raise ValueError("no observations yet")
        return inc[1]

    def consumes_gradients(self) -> bool:
        return self.strategy in ("BOTD", "BOSGPD")

    # -- surrogate construction ------------------------------------------

    def _signed(self, values: np.ndarray) -> np.ndarray:
        return values if self.sense == "max" else -values

    def _spec_and_noise(self):
        preset = dict(PRESETS[_STRATEGY_PRESET[self.strategy]])
        preset.update(
            {k: v for k, v in self.model_config.items() if k in preset}
        )
        spec = se_spec(preset["lengthscale"], preset["signal_variance"], dim=self.dim)
        return spec, preset["noise_variance"]

    def _fit_surrogate(self, t: int):
        X = np.array([o.x for o in self.observations])
        y = self._signed(np.array([o.y for o in self.observations]))
        spec, noise = self._spec_and_noise()
        cfg = self.model_config

        if self.strategy == "StandardBO":
            return GaussianProcess(spec, noise).fit(X, y)

        if self.strategy in ("BOTD", "BOSGPD"):
            has = [o.grad is not None for o in self.observations]
            grad_X = X[np.asarray(has)] if any(has) else None
            G = (
                self._signed(np.array([o.grad for o in self.observations if o.grad is not None]))
                if any(has)
                else None
            )
            if self.strategy == "BOTD":
                dn = cfg.get("deriv_noise", 1e-6)
                return DerivativeGaussianProcess(spec, noise, dn).fit(X, y, grad_X, G)
            m = int(cfg.get("m", max(1, int(np.ceil(0.7 * len(y))))))
            m = min(m, len(y))
            inducing = select_inducing(
                spec, X, y, m,
                InducingMode(cfg.get("inducing_mode", "random-subset")),
                grad_X=grad_X, grad_values=G, noise_variance=noise,
                seed=(self.seed, t),
            )
            return SparseDerivativeGP(spec, inducing, noise).fit(X, y, grad_X, G)

        if self.strategy == "BODMM":
            gppk, _ = fit_gppk_with_estimated_degree(
                X, y, q=cfg.get("q", 0.5), n_max=cfg.get("max_degree", 10)
            )
            G = gppk.estimate_derivatives(X)
            return DerivativeGaussianProcess(spec, noise).fit(X, y, X, G)

        m = int(cfg.get("m", 20))
        basis = sample_frequencies_se(spec, m, seed=(self.seed, t))
        if self.strategy == "SSGP-BO":
            model, _ = optimize_frequencies(
                spec, X, y, basis, noise, maxiter=int(cfg.get("freq_opt_iters", 30))
            )
            return model
        model, _ = fit_rssgp(
            spec, X, y, basis, self.bounds, noise,
            lam=cfg.get("lam", 10.0),
            estimator=cfg.get("gmd_method", "ei"),
            seed=self.seed + t,
            iters=int(cfg.get("rssgp_iters", 15)),
        )
        return model

    # -- ask / tell -------------------------------------------------------

    def ask(self, acq_budget: int = 2000) -> np.ndarray:
        if self.pending is not None:
            raise PendingSuggestionExists(
                f"campaign {self.id} already has a pending suggestion"
            )
        t = self._ask_count()
        rng = self._rng(t)
        fallback = False

        if t < self.n_init:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                sampler = qmc.Sobol(self.dim, scramble=True, seed=self.seed)
                pts = sampler.random(self.n_init)
            x = self.bounds[:, 0] + pts[t] * (self.bounds[:, 1] - self.bounds[:, 0])
        else:
            try:
                model = self._fit_surrogate(t)
                kind = self.model_config.get("acquisition", "ei")
                inc = float(self._signed(np.array([self.incumbent_value]))[0])
                tau = self.model_config.get("tau") or ucb_schedule(t, self.dim)
                acq = make_acquisition(kind, inc, xi=self.model_config.get("xi", 0.0), tau=tau)

                def score(P):
                    mean, var = model.predict(P, return_var=True)
                    return acq(mean, var)

                x, _ = direct.maximize(score, self.bounds, budget=acq_budget)
            except NumericalFailure:
                span = self.bounds[:, 1] - self.bounds[:, 0]
                x = self.bounds[:, 0] + rng.random(self.dim) * span
                fallback = True

        x = self._dedupe(np.asarray(x, dtype=float), rng)
        self.log.append(
            {"type": "ask", "t": t, "x": list(map(float, x)), "fallback": fallback}
        )
        self.pending = x
        self.last_ask_fallback = fallback
        return x

    def _dedupe(self, x: np.ndarray, rng) -> np.ndarray:
        if not self.observations:
            return x
        X = np.array([o.x for o in self.observations])
        span = self.bounds[:, 1] - self.bounds[:, 0]
        while np.min(np.max(np.abs(X - x), axis=1)) < 1e-9:
            x = np.clip(
                x + rng.normal(0.0, 1e-6) * span, self.bounds[:, 0], self.bounds[:, 1]
            )
        return x

    def tell(self, x, y, gradient=None, noise_var=None, out_of_band: bool = False):
        x = np.asarray(x, dtype=float).ravel()
        if x.shape[0] != self.dim:
            raise ValueError(f"point has dimension {x.shape[0]}, expected {self.dim}")
        if not np.isfinite(y):
            raise ValueError("observed value must be finite")
        if not out_of_band:
            if self.pending is None:
                raise NoPendingSuggestion(f"campaign {self.id} has no pending suggestion")
            if not np.allclose(x, self.pending, atol=1e-9):
                raise ValueError("point does not match the pending suggestion")
            if not in_bounds(x, self.bounds):
                raise ValueError("point lies outside the campaign bounds")
        grad = None
        if gradient is not None:
            grad = np.asarray(gradient, dtype=float).ravel()
            if grad.shape[0] != self.dim:
                raise ValueError("gradient dimension mismatch")
        obs = Observation(
            x, float(y), grad,
            float(noise_var) if noise_var is not None else self._spec_and_noise()[1],
        )
        self.observations.append(obs)
        event = {"type": "tell", **obs.to_dict()}
        if out_of_band:
            event["out_of_band"] = True
        else:
            self.pending = None
        self.log.append(event)
        return self

    # -- inspection helpers (consumed by the HTTP service) ----------------

    def trace(self) -> list[tuple[int, float, float]]:
        """(index, observed y, incumbent so far) per observation."""
        out = []
        best = None
        for i, o in enumerate(self.observations):
            if best is None:
                best = o.y
            elif (self.sense == "max" and o.y > best) or (
                self.sense == "min" and o.y < best
            ):
                best = o.y
            out.append((i, o.y, best))
        return out

    def _slice_points(self, axis: int, grid: np.ndarray) -> np.ndarray:
        anchor = (
            self.incumbent[0]
            if self.incumbent is not None
            else 0.5 * (self.bounds[:, 0] + self.bounds[:, 1])
        )
        P = np.tile(anchor, (len(grid), 1))
        P[:, axis] = grid
        return P

    def _slice_grid(self, axis: int, grid_size: int) -> np.ndarray:
        if not 0 <= axis < self.dim:
            raise ValueError(f"axis {axis} out of range for dimension {self.dim}")
        return np.linspace(self.bounds[axis, 0], self.bounds[axis, 1], grid_size)

    def posterior_slice(self, axis: int, grid_size: int = 101):
        """Posterior mean and +/- 2 sigma band along one input axis."""
        grid = self._slice_grid(axis, grid_size)
        model = self._fit_surrogate(self._ask_count())
        mean, var = model.predict(self._slice_points(axis, grid), return_var=True)
        sd = np.sqrt(np.maximum(var, 0.0))
        mean = self._signed(mean)
        return grid, mean, mean - 2 * sd, mean + 2 * sd

    def acquisition_slice(self, axis: int, grid_size: int = 101):
        grid = self._slice_grid(axis, grid_size)
        model = self._fit_surrogate(self._ask_count())
        kind = self.model_config.get("acquisition", "ei")
        inc = float(self._signed(np.array([self.incumbent_value]))[0])
        acq = make_acquisition(
            kind, inc,
            xi=self.model_config.get("xi", 0.0),
            tau=self.model_config.get("tau", 2.0),
        )
        mean, var = model.predict(self._slice_points(axis, grid), return_var=True)
        return grid, acq(mean, var)

    # -- persistence -------------------------------------------------------

    def to_dict(self) -> dict:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "id": self.id,
            "bounds": [[float(lo), float(hi)] for lo, hi in self.bounds],
            "sense": self.sense,
            "strategy": self.strategy,
            "model_config": self.model_config,
            "seed": self.seed,
            "observations": [o.to_dict() for o in self.observations],
            "log": self.log,
        }
        doc.update(self._extra)  # unknown fields survive the round trip
        return doc

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)

    @classmethod
    def from_dict(cls, doc: dict) -> "Campaign":
        version = doc.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {version!r}")
        known = {
            "schema_version", "id", "bounds", "sense", "strategy",
            "model_config", "seed", "observations", "log",
        }
        return cls(
            doc["id"],
            doc["bounds"],
            doc["sense"],
            doc["strategy"],
            doc.get("model_config", {}),
            doc["seed"],
            [Observation.from_dict(o) for o in doc.get("observations", [])],
            doc.get("log", []),
            extra={k: v for k, v in doc.items() if k not in known},
        )

    @classmethod
    def load(cls, path) -> "Campaign":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

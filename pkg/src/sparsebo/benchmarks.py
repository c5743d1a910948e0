"""Synthetic test functions, analytic gradients and the regret metric.

All evaluators are vectorized over an (n, d) array of inputs.  Each
function declares its box bounds, optimum location/value and whether it
is conventionally minimized or maximized; the optimization engine
normalizes everything to maximization internally.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .validation import check_array, check_bounds, in_bounds


@dataclass
class BenchmarkFn:
    name: str
    dim: int
    bounds: np.ndarray
    optimum_point: np.ndarray
    optimum_value: float
    sense: str  # "min" or "max"
    evaluator: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        self.bounds = check_bounds(self.bounds)
        self.optimum_point = np.asarray(self.optimum_point, dtype=float)
        if self.sense not in ("min", "max"):
            raise ValueError("sense must be 'min' or 'max'")

    def __call__(self, X) -> np.ndarray:
        X = check_array(X)
        if X.shape[1] != self.dim:
            raise ValueError(f"{self.name} expects dimension {self.dim}")
        if np.any(X < self.bounds[:, 0] - 1e-12) or np.any(X > self.bounds[:, 1] + 1e-12):
            raise ValueError(f"point outside the bounds of {self.name}")
        return self.evaluator(X)

    def grad(self, X) -> np.ndarray:
        if self.gradient is None:
            raise ValueError(f"{self.name} has no analytic gradient")
        return self.gradient(check_array(X))


def _multimodal1d(X):
    x = X[:, 0]
    return np.exp(-((x - 2) ** 2)) + np.exp(-((x - 6) ** 2) / 10) + 1.0 / (x**2 + 1)


def _multimodal1d_grad(X):
    x = X[:, 0]
    g = (
        -2 * (x - 2) * np.exp(-((x - 2) ** 2))
        - 0.2 * (x - 6) * np.exp(-((x - 6) ** 2) / 10)
        - 2 * x / (x**2 + 1) ** 2
    )
    return g[:, None]


def _branin(X):
    x1, x2 = X[:, 0], X[:, 1]
    a, b, c = 1.0, 5.1 / (4 * np.pi**2), 5.0 / np.pi
    r, s, t = 6.0, 10.0, 1.0 / (8 * np.pi)
    return a * (x2 - b * x1**2 + c * x1 - r) ** 2 + s * (1 - t) * np.cos(x1) + s


def _branin_grad(X):
    x1, x2 = X[:, 0], X[:, 1]
    b, c = 5.1 / (4 * np.pi**2), 5.0 / np.pi
    r, s, t = 6.0, 10.0, 1.0 / (8 * np.pi)
    inner = x2 - b * x1**2 + c * x1 - r
    g1 = 2 * inner * (-2 * b * x1 + c) - s * (1 - t) * np.sin(x1)
    g2 = 2 * inner
    return np.stack([g1, g2], axis=1)


_HARTMANN_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])

_H3_A = np.array([[3.0, 10, 30], [0.1, 10, 35], [3.0, 10, 30], [0.1, 10, 35]])
_H3_P = 1e-4 * np.array(
    [[3689, 1170, 2673], [4699, 4387, 7470], [1091, 8732, 5547], [381, 5743, 8828]]
)

_H4_A = np.array(
    [
        [10, 3, 17, 3.5],
        [0.05, 10, 17, 0.1],
        [3, 3.5, 1.7, 10],
        [17, 8, 0.05, 10],
    ]
)
_H4_P = 1e-4 * np.array(
    [
        [1312, 1696, 5569, 124],
        [2329, 4135, 8307, 3736],
        [2348, 1451, 3522, 2883],
        [4047, 8828, 8732, 5743],
    ]
)

_H6_A = np.array(
    [
        [10, 3, 17, 3.5, 1.7, 8],
        [0.05, 10, 17, 0.1, 8, 14],
        [3, 3.5, 1.7, 10, 17, 8],
        [17, 8, 0.05, 10, 0.1, 14],
    ]
)
_H6_P = 1e-4 * np.array(
    [
        [1312, 1696, 5569, 124, 8283, 5886],
        [2329, 4135, 8307, 3736, 1004, 9991],
        [2348, 1451, 3522, 2883, 3047, 6650],
        [4047, 8828, 8732, 5743, 1091, 381],
    ]
)


def _hartmann(A, P):
    def f(X):
        inner = np.sum(A[None, :, :] * (X[:, None, :] - P[None, :, :]) ** 2, axis=2)
        return -np.sum(_HARTMANN_ALPHA[None, :] * np.exp(-inner), axis=1)

    def grad(X):
        diff = X[:, None, :] - P[None, :, :]
        inner = np.sum(A[None, :, :] * diff**2, axis=2)
        e = _HARTMANN_ALPHA[None, :] * np.exp(-inner)
        return np.sum(e[:, :, None] * 2 * A[None, :, :] * diff, axis=1)

    return f, grad


def _ackley(X):
    d = X.shape[1]
    s1 = np.sqrt(np.sum(X**2, axis=1) / d)
    s2 = np.sum(np.cos(2 * np.pi * X), axis=1) / d
    return -20 * np.exp(-0.2 * s1) - np.exp(s2) + 20 + np.e


def _ackley_grad(X):
    d = X.shape[1]
    s1 = np.sqrt(np.sum(X**2, axis=1) / d)
    s2 = np.sum(np.cos(2 * np.pi * X), axis=1) / d
    safe = np.where(s1 > 0, s1, 1.0)
    g1 = 4.0 * np.exp(-0.2 * s1)[:, None] * X / (d * safe[:, None])
    g1 = np.where(s1[:, None] > 0, g1, 0.0)
    g2 = (2 * np.pi / d) * np.exp(s2)[:, None] * np.sin(2 * np.pi * X)
    return g1 + g2


def _gaussian_pdf(X):
    return np.exp(-0.5 * np.sum((X - 1.0) ** 2, axis=1))


def _gaussian_pdf_grad(X):
    return -_gaussian_pdf(X)[:, None] * (X - 1.0)


def _sinc(X):
    x = X[:, 0]
    return np.where(x == 0, 1.0, np.sin(x) / np.where(x == 0, 1.0, x))


def _sinc_grad(X):
    x = X[:, 0]
    safe = np.where(x == 0, 1.0, x)
    g = np.where(x == 0, 0.0, np.cos(x) / safe - np.sin(x) / safe**2)
    return g[:, None]


def _surrogate_accuracy(X):
    # smooth stand-in for a hyperparameter-tuning validation accuracy surface
    x1, x2 = X[:, 0], X[:, 1]
    bump = np.exp(-2.0 * ((x1 - 0.3) ** 2 + (x2 + 0.5) ** 2))
    ridge = 0.25 * np.exp(-8.0 * (x1 + 0.6) ** 2)
    return 0.55 + 0.42 * bump + ridge * (1 - bump)


_h3_f, _h3_g = _hartmann(_H3_A, _H3_P)
_h4_f, _h4_g = _hartmann(_H4_A, _H4_P)
_h6_f, _h6_g = _hartmann(_H6_A, _H6_P)


def _registry() -> dict[str, BenchmarkFn]:
    fns = [
        BenchmarkFn(
            "multimodal1d", 1, [[1.0, 4.0]], [2.0058], 1.4020,
            "max", _multimodal1d, _multimodal1d_grad,
        ),
        BenchmarkFn(
            "branin", 2, [[0.0, 4.0], [0.0, 4.0]], [np.pi, 2.275], 0.397887,
            "min", _branin, _branin_grad,
        ),
        BenchmarkFn(
            "hartmann3", 3, [[0.0, 1.0]] * 3,
            [0.114614, 0.555649, 0.852547], -3.86278, "min", _h3_f, _h3_g,
        ),
        BenchmarkFn(
            "hartmann4", 4, [[0.0, 1.0]] * 4,
            [0.187395, 0.194152, 0.557918, 0.264780], -3.729841, "min", _h4_f, _h4_g,
        ),
        BenchmarkFn(
            "hartmann6", 6, [[0.0, 1.0]] * 6,
            [0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573],
            -3.32237, "min", _h6_f, _h6_g,
        ),
        BenchmarkFn(
            "ackley2", 2, [[-10.0, 10.0]] * 2, [0.0, 0.0], 0.0,
            "min", _ackley, _ackley_grad,
        ),
        BenchmarkFn(
            "gaussianpdf3", 3, [[0.0, 2.0]] * 3, [1.0] * 3, 1.0,
            "max", _gaussian_pdf, _gaussian_pdf_grad,
        ),
        BenchmarkFn(
            "gaussianpdf5", 5, [[0.0, 2.0]] * 5, [1.0] * 5, 1.0,
            "max", _gaussian_pdf, _gaussian_pdf_grad,
        ),
        BenchmarkFn(
            "sinc", 1, [[-10.0, 10.0]], [0.0], 1.0, "max", _sinc, _sinc_grad,
        ),
        BenchmarkFn(
            "surrogate-accuracy", 2, [[-1.0, 1.0]] * 2, [0.3, -0.5], 0.97,
            "max", _surrogate_accuracy, None,
        ),
    ]
    return {f.name: f for f in fns}


BENCHMARKS = _registry()


def get_benchmark(name: str) -> BenchmarkFn:
    try:
        return BENCHMARKS[name]
    except KeyError:
        raise ValueError(f"unknown benchmark {name!r}; known: {sorted(BENCHMARKS)}")


def simple_regret(fn: BenchmarkFn, best_value: float) -> float:
    """Gap between the global optimum and the best observed value."""
    if fn.sense == "max":
        return max(fn.optimum_value - best_value, 0.0)
    return max(best_value - fn.optimum_value, 0.0)


@dataclass
class RegretTrace:
    seed: int
    regrets: list[float] = field(default_factory=list)

    def append(self, r: float):
        if self.regrets and r > self.regrets[-1] + 1e-12:
            r = self.regrets[-1]
        self.regrets.append(max(r, 0.0))


CSV_HEADER = "iter,seed,metric,value,wallclock_ms"


def run_bo_experiment(
    fn_name: str,
    strategy: str,
    iterations: int,
    seeds,
    model_config: dict | None = None,
    acq_budget: int = 400,
    timing: bool = False,
) -> list[str]:
    """Run the BO loop for each seed and emit CSV rows of simple regret.

    The wallclock column is written as 0 unless ``timing`` is requested,
    so that identical configurations produce byte-identical output.
    """
    from .engine import Campaign  # local import to avoid a cycle

    fn = get_benchmark(fn_name)
    rows = [CSV_HEADER]
    for seed in seeds:
        t0 = time.perf_counter()
        campaign = Campaign.new(
            bounds=fn.bounds,
            sense=fn.sense,
            strategy=strategy,
            seed=int(seed),
            model_config=model_config or {},
        )
        trace = RegretTrace(int(seed))
        n_init = campaign.n_init
        for it in range(n_init + iterations):
            x = campaign.ask(acq_budget=acq_budget)
            y = float(fn(np.asarray(x)[None, :])[0])
            grad = None
            if campaign.consumes_gradients() and fn.gradient is not None:
                grad = fn.grad(np.asarray(x)[None, :])[0]
            campaign.tell(x, y, gradient=grad)
            if it >= n_init - 1:
                trace.append(simple_regret(fn, campaign.incumbent_value))
        ms = (time.perf_counter() - t0) * 1000.0 if timing else 0.0
        for i, r in enumerate(trace.regrets):
            rows.append(f"{i},{seed},regret,{r:.17g},{ms:.3f}")
    return rows


def run_regression_case(case: str, seeds, inducing_fraction=None, timing: bool = False) -> list[str]:
    """Sparse-vs-exact regression comparison on one benchmark case.

    Cases mirror the regression protocol table: per trial, draw t noisy
    function observations plus a noisy full gradient at each, fit StdGP /
    GPD / sparse variants, and report test MSE rows per method.  All
    derivative-aware models use a derivative noise matched to the
    observation noise.
    """
    from .gp import GaussianProcess, PRESETS
    from .gpd import DerivativeGaussianProcess
    from .kernels import se_spec
    from .sparse_fic import InducingMode, InducingSet, SparseDerivativeGP, select_inducing

    table = {
        "1d": ("multimodal1d", 30, 450, 0.7),
        "2d": ("branin", 200, 800, 0.7),
        "3d": ("hartmann3", 200, 800, 0.5),
        "4d": ("hartmann4", 300, 900, 0.5),
        "6d": ("hartmann6", 300, 900, 0.5),
    }
    if case not in table:
        raise ValueError(f"unknown regression case {case!r}")
    fn_name, t, n_test, frac = table[case]
    if inducing_fraction is not None:
        frac = inducing_fraction
    fn = get_benchmark(fn_name)
    preset = PRESETS["sparse-derivative"]
    spec = se_spec(preset["lengthscale"], preset["signal_variance"], dim=fn.dim)
    noise = preset["noise_variance"]

    rows = [CSV_HEADER]
    for seed in seeds:
        t0 = time.perf_counter()
        rng = np.random.default_rng(int(seed))
        span = fn.bounds[:, 1] - fn.bounds[:, 0]
        X = fn.bounds[:, 0] + rng.random((t, fn.dim)) * span
        y = fn(X) + rng.normal(0.0, np.sqrt(noise), t)
        G = fn.grad(X) + rng.normal(0.0, np.sqrt(noise), (t, fn.dim))
        X_test = fn.bounds[:, 0] + rng.random((n_test, fn.dim)) * span
        y_test = fn(X_test)

        def mse(model) -> float:
            return float(np.mean((model.predict(X_test) - y_test) ** 2))

        m = max(1, int(round(frac * t)))
        dn = noise
        results = {
            "mse_stdgp": mse(GaussianProcess(spec, noise).fit(X, y)),
            "mse_gpd": mse(
                DerivativeGaussianProcess(spec, noise, dn).fit(X, y, X, G)
            ),
            "mse_sgpd_random": mse(
                SparseDerivativeGP(
                    spec,
                    select_inducing(spec, X, y, m, InducingMode.RANDOM_SUBSET, seed=int(seed)),
                    noise,
                    deriv_noise=dn,
                ).fit(X, y, X, G)
            ),
            "mse_sgpd_optimal": mse(
                SparseDerivativeGP(
                    spec,
                    select_inducing(
                        spec, X, y, m, InducingMode.OPTIMIZED,
                        grad_X=X, grad_values=G, noise_variance=noise,
                        deriv_noise=dn, seed=int(seed), budget=40,
                    ),
                    noise,
                    deriv_noise=dn,
                ).fit(X, y, X, G)
            ),
            "mse_sgpd_full": mse(
                SparseDerivativeGP(
                    spec, InducingSet(X.copy(), InducingMode.ALL_TRAINING), noise,
                    deriv_noise=dn,
                ).fit(X, y, X, G)
            ),
        }
        ms = (time.perf_counter() - t0) * 1000.0 if timing else 0.0
        for metric, value in results.items():
            rows.append(f"0,{seed},{metric},{value:.17g},{ms:.3f}")
    return rows

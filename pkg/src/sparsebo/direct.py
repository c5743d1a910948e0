"""Global maximization by dividing rectangles plus pattern-search polish.

The search trisects a normalized unit cube, always expanding the set of
potentially optimal rectangles (lower convex hull over rectangle size vs
center value), then spends the remaining budget on a deterministic
compass search around the best center.  Objectives are evaluated in
batches: ``f`` receives an (n, d) array and returns n values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import check_bounds

DEFAULT_BUDGET = 2000
REFINE_FRACTION = 0.25


@dataclass
class SearchSpace:
    bounds: np.ndarray
    budget: int = DEFAULT_BUDGET
    tolerance: float = 1e-8

    def __post_init__(self):
        self.bounds = check_bounds(self.bounds)
        if self.budget < 1:
            raise ValueError("budget must be >= 1")


def _potentially_optimal(measures, values, eps=1e-4):
    """Indices of rectangles on the lower-right convex hull."""
    n = len(values)
    f_min = float(np.min(values))
    out = []
    for j in range(n):
        dj, fj = measures[j], values[j]
        same = np.abs(measures - dj) < 1e-15
        if fj > np.min(values[same]) + 1e-15:
            continue
        smaller = measures < dj
        larger = measures > dj
        lo = np.max((fj - values[smaller]) / (dj - measures[smaller])) if np.any(smaller) else -np.inf
        hi = np.min((values[larger] - fj) / (measures[larger] - dj)) if np.any(larger) else np.inf
        if lo > hi + 1e-15:
            continue
        if np.any(larger):
            denom = abs(f_min) if f_min != 0 else 1.0
            if f_min != 0:
                if eps > (f_min - fj) / denom + (dj / denom) * hi:
                    continue
            elif fj > dj * hi:
                continue
        out.append(j)
    return out


def maximize(f, bounds, budget: int = DEFAULT_BUDGET, seed: int = 0, vectorized: bool = True):
    """Globally maximize f over box bounds; returns (point, value).

    Deterministic given (f, bounds, budget); increasing the budget only
    extends the evaluation sequence, so the result never gets worse.
    """
    space = SearchSpace(check_bounds(bounds), budget)
    lower = space.bounds[:, 0]
    width = space.bounds[:, 1] - lower
    d = len(lower)

    if not vectorized:
        scalar = f
        f = lambda P: np.array([scalar(p) for p in P])

    def evaluate(unit_points: np.ndarray) -> np.ndarray:
        return -np.asarray(f(lower + unit_points * width), dtype=float)

    direct_budget = max(1, budget - int(budget * REFINE_FRACTION)) if budget > 4 * d else budget
    evals = 0

    centers = np.full((1, d), 0.5)
    levels = np.zeros((1, d), dtype=int)  # trisection count per dimension
    values = evaluate(centers)
    evals += 1

    def measure(lv):
        sides = 3.0 ** (-lv.astype(float))
        return 0.5 * np.linalg.norm(sides, axis=-1)

    while evals < direct_budget:
        meas = measure(levels)
        chosen = _potentially_optimal(meas, values)
        if not chosen:
            chosen = [int(np.argmin(values))]
        progressed = False
        for j in chosen:
            lv = levels[j].copy()
            max_side = np.min(lv)  # smallest level = largest side
            dims = np.where(lv == max_side)[0]
            need = 2 * len(dims)
            if evals + need > direct_budget:
                continue
            delta = 3.0 ** (-(max_side + 1.0))
            pts = []
            for g in dims:
                for s in (-1.0, 1.0):
                    p = centers[j].copy()
                    p[g] += s * delta
                    pts.append(p)
            pts = np.asarray(pts)
            vals = evaluate(pts)
            evals += need
            progressed = True
            # divide best dimension first so it keeps the largest children
            w = np.minimum(vals[0::2], vals[1::2])
            order = dims[np.argsort(w, kind="stable")]
            new_centers, new_levels, new_values = [], [], []
            cur_level = levels[j].copy()
            for g in order:
                cur_level[g] += 1
                k = int(np.where(dims == g)[0][0])
                for s_idx, s in enumerate((-1.0, 1.0)):
                    p = centers[j].copy()
                    p[g] += s * delta
                    new_centers.append(p)
                    new_levels.append(cur_level.copy())
                    new_values.append(vals[2 * k + s_idx])
            levels[j] = cur_level
            centers = np.vstack([centers, new_centers])
            levels = np.vstack([levels, new_levels])
            values = np.concatenate([values, new_values])
        if not progressed:
            break

    best = int(np.argmin(values))
    best_point = centers[best].copy()
    best_value = values[best]

    # compass-search polish on the remaining budget
    step = 3.0 ** (-(np.min(levels[best]) + 1.0))
    while evals + 2 * d <= budget and step > space.tolerance:
        probes = []
        for g in range(d):
            for s in (-1.0, 1.0):
                p = best_point.copy()
                p[g] = min(max(p[g] + s * step, 0.0), 1.0)
                probes.append(p)
        probes = np.asarray(probes)
        vals = evaluate(probes)
        evals += len(probes)
        k = int(np.argmin(vals))
        if vals[k] < best_value:
            best_value = vals[k]
            best_point = probes[k]
        else:
            step /= 2.0
    return lower + best_point * width, float(-best_value)

"""Command-line front end: benchmarks, regression runs, campaigns, server."""

from __future__ import annotations

import functools
import sys
import time

import click
import numpy as np

from .benchmarks import CSV_HEADER, get_benchmark, run_bo_experiment, run_regression_case
from .engine import Campaign, NoPendingSuggestion, PendingSuggestionExists
from .gp import PRESETS
from .kernels import se_spec
from .sparse_spectrum import (
    gmd_ei_proxy,
    gmd_smc,
    gmd_thompson,
    optimize_frequencies,
    sample_frequencies_se,
)


def _runtime_errors(fn):
    """Map runtime failures to exit code 1 (usage errors stay at 2)."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (click.ClickException, click.Abort):
            raise
        except PendingSuggestionExists as e:
            click.echo(f"Conflict: {e}", err=True)
            sys.exit(1)
        except Exception as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(1)

    return wrapper


def _write_rows(rows, out):
    text = "\n".join(rows) + "\n"
    if out == "-":
        click.echo(text, nl=False)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _parse_seeds(seeds: str):
    if ":" in seeds:
        lo, hi = seeds.split(":")
        return list(range(int(lo), int(hi)))
    return [int(s) for s in seeds.split(",")]


@click.group()
def main():
    """Sparse-GP Bayesian optimization toolkit."""


@main.group()
def bench():
    """Benchmark experiments."""


@bench.command("run")
@click.option("--fn", required=True, help="benchmark function name")
@click.option("--strategy", default="StandardBO", show_default=True)
@click.option("--iters", default=20, show_default=True, type=int)
@click.option("--seeds", default="0:5", show_default=True, help="a:b range or comma list")
@click.option("--out", default="-", show_default=True, help="CSV path or - for stdout")
@click.option(
    "--timing/--no-timing", default=False, show_default=True,
    help="record real wall time (breaks byte-identical reruns)",
)
@_runtime_errors
def bench_run(fn, strategy, iters, seeds, out, timing):
    """Run the BO loop on a benchmark and emit regret CSV."""
    rows = run_bo_experiment(fn, strategy, iters, _parse_seeds(seeds), timing=timing)
    _write_rows(rows, out)


@main.command()
@click.option(
    "--table1-case", "case",
    type=click.Choice(["1d", "2d", "3d", "4d", "6d"]), required=True,
)
@click.option("--seeds", default="0:10", show_default=True)
@click.option("--out", default="-", show_default=True)
@click.option("--timing/--no-timing", default=False, show_default=True)
@_runtime_errors
def regress(case, seeds, out, timing):
    """Sparse-vs-exact regression comparison, emitting test-MSE CSV."""
    rows = run_regression_case(case, _parse_seeds(seeds), timing=timing)
    _write_rows(rows, out)


@main.group()
def campaign():
    """Manage a file-backed ask/tell campaign."""


@campaign.command("new")
@click.option("--file", "path", required=True, type=click.Path())
@click.option("--bounds", required=True, help="comma-separated lo:hi per dimension")
@click.option("--sense", default="max", type=click.Choice(["min", "max"]))
@click.option("--strategy", default="StandardBO", show_default=True)
@click.option("--seed", default=0, show_default=True, type=int)
@_runtime_errors
def campaign_new(path, bounds, sense, strategy, seed):
    parsed = [[float(v) for v in b.split(":")] for b in bounds.split(",")]
    c = Campaign.new(bounds=parsed, sense=sense, strategy=strategy, seed=seed)
    c.save(path)
    click.echo(c.id)


@campaign.command("ask")
@click.option("--file", "path", required=True, type=click.Path(exists=True))
@_runtime_errors
def campaign_ask(path):
    c = Campaign.load(path)
    x = c.ask()
    c.save(path)
    click.echo(" ".join(f"{v:.10g}" for v in x))


@campaign.command("tell")
@click.option("--file", "path", required=True, type=click.Path(exists=True))
@click.option("--x", "point", required=True, help="space-separated coordinates")
@click.option("--y", "value", required=True, type=float)
@click.option("--grad", default=None, help="space-separated gradient entries")
@click.option("--out-of-band", is_flag=True, default=False)
@_runtime_errors
def campaign_tell(path, point, value, grad, out_of_band):
    c = Campaign.load(path)
    x = np.array([float(v) for v in point.split()])
    g = np.array([float(v) for v in grad.split()]) if grad else None
    try:
        c.tell(x, value, gradient=g, out_of_band=out_of_band)
    except NoPendingSuggestion as e:
        click.echo(f"Conflict: {e}", err=True)
        sys.exit(1)
    c.save(path)
    inc = c.incumbent
    click.echo(f"observations={len(c.observations)} incumbent={inc[1]:.10g}")


@campaign.command("status")
@click.option("--file", "path", required=True, type=click.Path(exists=True))
@_runtime_errors
def campaign_status(path):
    c = Campaign.load(path)
    inc = c.incumbent
    click.echo(f"id: {c.id}")
    click.echo(f"strategy: {c.strategy}  sense: {c.sense}  seed: {c.seed}")
    click.echo(f"observations: {len(c.observations)}")
    click.echo(
        "pending: " + (" ".join(f"{v:.6g}" for v in c.pending) if c.pending is not None else "none")
    )
    if inc is not None:
        click.echo(f"incumbent: {inc[1]:.10g} at " + " ".join(f"{v:.6g}" for v in inc[0]))


@main.command()
@click.option("--addr", default="127.0.0.1:8000", show_default=True)
@click.option("--state-dir", default="./campaigns", show_default=True)
@_runtime_errors
def serve(addr, state_dir):
    """Start the HTTP campaign service."""
    import uvicorn

    from .service import create_app

    host, _, port = addr.partition(":")
    uvicorn.run(create_app(state_dir), host=host, port=int(port or 8000))


@main.command()
@click.option("--method", type=click.Choice(["ts", "smc", "ei"]), default="ts", show_default=True)
@click.option("--fn", default="sinc", show_default=True)
@click.option("--n-train", default=20, show_default=True, type=int)
@click.option("--m", default=20, show_default=True, type=int)
@click.option("--seeds", default="0:5", show_default=True)
@click.option("--out", default="-", show_default=True)
@_runtime_errors
def gmd(method, fn, n_train, m, seeds, out):
    """Estimate the global maximizer distribution entropy of a fitted model."""
    bench_fn = get_benchmark(fn)
    preset = PRESETS["sparse-spectrum"]
    spec = se_spec(preset["lengthscale"], preset["signal_variance"], dim=bench_fn.dim)
    rows = [CSV_HEADER]
    for seed in _parse_seeds(seeds):
        t0 = time.perf_counter()
        rng = np.random.default_rng(seed)
        span = bench_fn.bounds[:, 1] - bench_fn.bounds[:, 0]
        X = bench_fn.bounds[:, 0] + rng.random((n_train, bench_fn.dim)) * span
        sign = 1.0 if bench_fn.sense == "max" else -1.0
        y = sign * bench_fn(X) + rng.normal(0, 0.01, n_train)
        basis = sample_frequencies_se(spec, m, seed=seed)
        model, _ = optimize_frequencies(spec, X, y, basis, preset["noise_variance"])
        if method == "ts":
            est = gmd_thompson(model, bench_fn.bounds, seed=seed)
        elif method == "smc":
            est = gmd_smc(model, bench_fn.bounds, seed=seed)
        else:
            est = gmd_ei_proxy(model, bench_fn.bounds, float(np.max(y)), seed=seed)
        ms = (time.perf_counter() - t0) * 1000.0
        rows.append(f"0,{seed},gmd_entropy_{method},{est.entropy:.17g},{ms:.3f}")
    _write_rows(rows, out)


if __name__ == "__main__":
    main()

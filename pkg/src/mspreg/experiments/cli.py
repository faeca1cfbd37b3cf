"""Command-line experiment driver.

Subcommands cover dataset simulation, solution-path tracing,
cross-validated benchmarking, penalty-robustness sweeps, cross-validation
curves, and the rolling-window index-tracking pipeline.  Every run is
deterministic given ``--seed`` and writes a ``manifest.json`` recording the
invocation next to its outputs.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import click
import numpy as np

from .. import __version__
from ..data import save_dataset_csv, standardize
from ..metrics import write_table_csv
from ..simgen import ScenarioConfig, gen_scenario
from .bench import MSP_LAMBDA_FRACTION, lambda_robustness, run_benchmark
from .grids import METHODS, classify_variables, cross_validate, lambda_grid, trace_path
from .tracking import load_prices_csv, track_index

DEFAULT_ROBUSTNESS_LAMBDAS = "0.5,1,1.5,2,2.5,3,3.5,4,4.5"


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _write_manifest(out_dir: Path, command: str, params: dict) -> None:
    manifest = {
        "command": command,
        "params": params,
        "versions": {"mspreg": __version__, "numpy": np.__version__},
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _out_dir(out: str) -> Path:
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _scenario_options(func):
    func = click.option("--scenario", type=click.IntRange(1, 2), default=1, show_default=True,
                        help="Which synthetic covariance scenario to draw.")(func)
    func = click.option("--n", type=int, default=100, show_default=True)(func)
    func = click.option("--p", type=int, default=50, show_default=True)(func)
    func = click.option("--q", type=int, default=4, show_default=True,
                        help="Number of nonzero true coefficients.")(func)
    func = click.option("--sigma", type=float, default=1.0, show_default=True)(func)
    return func


@click.group()
@click.version_option(version=__version__)
def main():
    """Sparse-regression benchmarks and index tracking."""


@main.command()
@_scenario_options
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True, help="Output directory.")
def simulate(scenario, n, p, q, sigma, seed, out):
    """Draw one dataset and write data.csv / truth.csv."""
    config = ScenarioConfig(n=n, p=p, scenario=scenario, q=q, sigma=sigma, seed=seed)
    data = gen_scenario(config)
    out_dir = _out_dir(out)
    save_dataset_csv(data, out_dir / "data.csv")
    with open(out_dir / "truth.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["variable", "beta"])
        for j, b in enumerate(data.truth.beta):
            writer.writerow([f"x{j + 1}", _fmt(b)])
    _write_manifest(out_dir, "simulate", {
        "scenario": scenario, "n": n, "p": p, "q": q, "sigma": sigma, "seed": seed,
    })
    click.echo(f"wrote {out_dir / 'data.csv'} and {out_dir / 'truth.csv'}")


@main.command()
@_scenario_options
@click.option("--method", type=click.Choice(METHODS), default="msp", show_default=True)
@click.option("--grid-size", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def path(scenario, n, p, q, sigma, method, grid_size, seed, out):
    """Trace one estimator's solution path over a descending penalty grid."""
    config = ScenarioConfig(n=n, p=p, scenario=scenario, q=q, sigma=sigma, seed=seed)
    data = gen_scenario(config)
    design = standardize(data)
    grid = lambda_grid(design, design.y, grid_size)
    result = trace_path(data, method, grid)
    labels = classify_variables(data.p, data.truth.support)
    out_dir = _out_dir(out)
    with open(out_dir / "path.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", "variable", "value", "class"])
        for lam, coefs in zip(result.lambdas, result.coefs):
            for j in range(data.p):
                writer.writerow([_fmt(lam), f"x{j + 1}", _fmt(coefs.values[j]), labels[j]])
    _write_manifest(out_dir, "path", {
        "scenario": scenario, "n": n, "p": p, "q": q, "sigma": sigma,
        "method": method, "grid_size": grid_size, "seed": seed,
    })
    click.echo(f"wrote {out_dir / 'path.csv'}")


@main.command()
@_scenario_options
@click.option("--methods", default=",".join(METHODS), show_default=True,
              help="Comma-separated method list.")
@click.option("--reps", type=int, default=100, show_default=True)
@click.option("--grid-size", type=int, default=100, show_default=True)
@click.option("--folds", type=int, default=10, show_default=True)
@click.option("--msp-policy", type=click.Choice(["fixed", "cv"]), default="fixed",
              show_default=True, help="Penalty policy for the multi-screen fit.")
@click.option("--msp-fraction", type=float, default=MSP_LAMBDA_FRACTION, show_default=True,
              help="lam = fraction * lambda_max under the fixed policy.")
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Worker processes for replications.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def bench(scenario, n, p, q, sigma, methods, reps, grid_size, folds, msp_policy,
          msp_fraction, jobs, seed, out):
    """Replicated benchmark table (mean (sd) of l2/l1/NZ/FPR/TPR per method)."""
    config = ScenarioConfig(n=n, p=p, scenario=scenario, q=q, sigma=sigma, seed=seed)
    method_list = tuple(m.strip() for m in methods.split(",") if m.strip())
    result = run_benchmark(config, method_list, reps=reps, grid_size=grid_size,
                           folds=folds, msp_policy=msp_policy, msp_fraction=msp_fraction,
                           jobs=jobs)
    out_dir = _out_dir(out)
    footer = [f"excluded replications for {m}: {c}" for m, c in sorted(result.failure_counts().items())]
    write_table_csv(result.summaries, out_dir / "bench.csv", footer_lines=footer)
    _write_manifest(out_dir, "bench", {
        "scenario": scenario, "n": n, "p": p, "q": q, "sigma": sigma,
        "methods": list(method_list), "reps": reps, "grid_size": grid_size,
        "folds": folds, "msp_policy": msp_policy, "msp_fraction": msp_fraction,
        "seed": seed,
    })
    click.echo(f"wrote {out_dir / 'bench.csv'}")


@main.command()
@_scenario_options
@click.option("--method", type=click.Choice(METHODS), default="lasso", show_default=True)
@click.option("--grid-size", type=int, default=100, show_default=True)
@click.option("--folds", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def cv(scenario, n, p, q, sigma, method, grid_size, folds, seed, out):
    """Cross-validation error curve and selected penalty for one method."""
    config = ScenarioConfig(n=n, p=p, scenario=scenario, q=q, sigma=sigma, seed=seed)
    data = gen_scenario(config)
    design = standardize(data)
    grid = lambda_grid(design, design.y, grid_size)
    result = cross_validate(data, method, grid, folds=folds, seed=seed)
    out_dir = _out_dir(out)
    with open(out_dir / "cv.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", "mean_sq_error"])
        for lam, err in zip(result.lambdas, result.mean_errors):
            writer.writerow([_fmt(lam), _fmt(err)])
    _write_manifest(out_dir, "cv", {
        "scenario": scenario, "n": n, "p": p, "q": q, "sigma": sigma,
        "method": method, "grid_size": grid_size, "folds": folds, "seed": seed,
        "selected_lambda": result.lam,
    })
    click.echo(f"selected lambda = {_fmt(result.lam)} (grid index {result.index})")


@main.command()
@_scenario_options
@click.option("--lambdas", default=DEFAULT_ROBUSTNESS_LAMBDAS, show_default=True,
              help="Comma-separated raw penalty values.")
@click.option("--reps", type=int, default=50, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def robustness(scenario, n, p, q, sigma, lambdas, reps, seed, out):
    """Mean l2 error of the multi-screen fit across a list of penalties."""
    config = ScenarioConfig(n=n, p=p, scenario=scenario, q=q, sigma=sigma, seed=seed)
    lam_list = [float(v) for v in lambdas.split(",") if v.strip()]
    rows = lambda_robustness(config, lam_list, reps=reps)
    out_dir = _out_dir(out)
    with open(out_dir / "robustness.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", "mean_l2", "sd_l2"])
        for lam, mean_l2, sd_l2 in rows:
            writer.writerow([_fmt(lam), _fmt(mean_l2), _fmt(sd_l2)])
    _write_manifest(out_dir, "robustness", {
        "scenario": scenario, "n": n, "p": p, "q": q, "sigma": sigma,
        "lambdas": lam_list, "reps": reps, "seed": seed,
    })
    click.echo(f"wrote {out_dir / 'robustness.csv'}")


@main.command()
@click.option("--prices", type=click.Path(exists=True), required=True,
              help="Price CSV: date, index, then one column per stock.")
@click.option("--method", type=click.Choice(METHODS), default="msp", show_default=True)
@click.option("--k", type=int, default=20, show_default=True,
              help="Maximum number of stocks in the basket.")
@click.option("--train", "train_len", type=int, default=100, show_default=True)
@click.option("--test", "test_len", type=int, default=20, show_default=True)
@click.option("--windows", "n_windows", type=int, default=None,
              help="Number of rolling windows (default: as many as fit).")
@click.option("--grid-size", type=int, default=100, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def track(prices, method, k, train_len, test_len, n_windows, grid_size, out):
    """Rolling-window index tracking with a sparse basket."""
    _, index_prices, stock_prices, _ = load_prices_csv(prices)
    windows = track_index(index_prices, stock_prices, method=method, k=k,
                          train_len=train_len, test_len=test_len,
                          n_windows=n_windows, grid_size=grid_size)
    out_dir = _out_dir(out)
    with open(out_dir / "windows.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window", "train_start", "test_start", "test_end",
                         "lambda", "nz", "fitted_error", "predicted_error"])
        for w in windows:
            writer.writerow([w.index, w.train_start, w.test_start, w.test_end,
                             _fmt(w.lam), w.nz, _fmt(w.fitted_error), _fmt(w.predicted_error)])
    _write_manifest(out_dir, "track", {
        "prices": str(prices), "method": method, "k": k, "train": train_len,
        "test": test_len, "windows": len(windows), "grid_size": grid_size,
    })
    fitted = np.mean([w.fitted_error for w in windows])
    predicted = np.mean([w.predicted_error for w in windows])
    click.echo(f"{len(windows)} windows | mean fitted error {_fmt(fitted)} | "
               f"mean predicted error {_fmt(predicted)}")


if __name__ == "__main__":
    main()

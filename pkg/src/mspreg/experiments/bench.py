"""Replicated benchmarks, penalty-robustness sweeps, and sparsity targeting."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..data import Dataset, destandardize, standardize
from ..metrics import EvalReport, evaluate, summarize
from ..solver import SolverOptions
from ..estimators import MSP_LAMBDA_FRACTION, fit_lasso, fit_msp, msp_default_lambda
from ..simgen import ScenarioConfig, gen_scenario
from .grids import METHODS, FitOutcome, cv_error_curves, fit_method, lambda_grid

__all__ = [
    "BenchmarkResult",
    "run_benchmark",
    "lambda_robustness",
    "select_lambda_for_sparsity",
    "MSP_LAMBDA_FRACTION",
]


@dataclass(frozen=True)
class BenchmarkResult:
    """Summaries and per-replication reports for one benchmark run."""

    config: ScenarioConfig
    methods: tuple[str, ...]
    reps: int
    summaries: dict[str, dict[str, tuple[float, float]]]
    reports: dict[str, list[EvalReport]]
    failures: list[tuple[str, int, str]] = field(default_factory=list)

    def failure_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for method, _, _ in self.failures:
            counts[method] = counts.get(method, 0) + 1
        return counts


def _cv_seed(seed: int, rep: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(rep, 1)).generate_state(1)[0])


def _bench_rep(config: ScenarioConfig, methods, rep: int, grid_size: int, folds: int,
               msp_policy: str, msp_fraction: float, opts: SolverOptions | None):
    data = gen_scenario(config, stream=rep)
    design = standardize(data)
    grid = lambda_grid(design, design.y, grid_size)
    results: dict[str, EvalReport] = {}
    failures: list[tuple[str, int, str]] = []
    cv_methods = [m for m in methods if not (m == "msp" and msp_policy == "fixed")]
    curves: dict[str, np.ndarray] = {}
    if cv_methods:
        try:
            curves = cv_error_curves(data, cv_methods, grid, folds=folds,
                                     seed=_cv_seed(config.seed, rep), opts=opts)
        except Exception as exc:  # noqa: BLE001 - a failed rep is excluded, not fatal
            failures.extend((m, rep, str(exc)) for m in cv_methods)
            cv_methods = []
    for method in methods:
        try:
            if method == "msp" and msp_policy == "fixed":
                lam = msp_fraction * float(grid[0])
            elif method in curves:
                lam = float(grid[int(np.argmin(curves[method]))])
            else:
                continue
            outcome = fit_method(method, design, design.y, lam, opts)
            raw = destandardize(outcome.coefs, design)
            results[method] = evaluate(raw, data.truth)
        except Exception as exc:  # noqa: BLE001
            failures.append((method, rep, str(exc)))
    return results, failures


def run_benchmark(config: ScenarioConfig, methods=METHODS, reps: int = 100,
                  grid_size: int = 100, folds: int = 10, msp_policy: str = "fixed",
                  msp_fraction: float = MSP_LAMBDA_FRACTION,
                  opts: SolverOptions | None = None, jobs: int = 1) -> BenchmarkResult:
    """Replicate a scenario, fit each method at its selected penalty, summarize.

    Every method's penalty comes from 10-fold cross-validation except the
    screened multi-step fit, which defaults to the fixed small-penalty
    policy (``msp_policy='cv'`` switches it to cross-validation too).
    Replication r uses random sub-stream r, so runs are reproducible and
    parallelizable; failed (method, replication) pairs are recorded and
    excluded rather than aborting the run.
    """
    if reps < 2:
        raise ValueError("reps must be at least 2")
    if msp_policy not in ("fixed", "cv"):
        raise ValueError("msp_policy must be 'fixed' or 'cv'")
    methods = tuple(methods)
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ValueError(f"unknown methods: {unknown}")

    collected: dict[str, list[EvalReport]] = {m: [] for m in methods}
    failures: list[tuple[str, int, str]] = []
    args = [(config, methods, rep, grid_size, folds, msp_policy, msp_fraction, opts)
            for rep in range(reps)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rep_outputs = list(pool.map(_bench_rep_star, args))
    else:
        rep_outputs = [_bench_rep(*a) for a in args]
    for results, rep_failures in rep_outputs:
        for method, report in results.items():
            collected[method].append(report)
        failures.extend(rep_failures)

    summaries = {m: summarize(collected[m]) for m in methods if collected[m]}
    return BenchmarkResult(config=config, methods=methods, reps=reps,
                           summaries=summaries, reports=collected, failures=failures)


def _bench_rep_star(args):
    return _bench_rep(*args)


def lambda_robustness(config: ScenarioConfig, lambdas, reps: int = 50,
                      opts: SolverOptions | None = None,
                      same_lambda: bool = False) -> list[tuple[float, float, float]]:
    """Mean l2 error of the screened multi-step fit per raw penalty value.

    The swept value is the reweighting penalty; the first-step screening
    penalty stays at the fixed benchmark policy so the sweep isolates the
    reweighting behavior (``same_lambda=True`` sweeps both together).  The
    same replication streams are reused for every penalty, so duplicate
    entries in ``lambdas`` produce identical outputs.  Returns
    ``(lam, mean_l2, sd_l2)`` tuples in input order.
    """
    lambdas = [float(v) for v in lambdas]
    if not lambdas:
        raise ValueError("lambdas must be nonempty")
    errors = np.empty((reps, len(lambdas)))
    for rep in range(reps):
        data = gen_scenario(config, stream=rep)
        design = standardize(data)
        lam0 = None if same_lambda else msp_default_lambda(design, design.y)
        for i, lam in enumerate(lambdas):
            trace = fit_msp(design, design.y, lam if lam0 is None else lam0, lam, opts)
            raw = destandardize(trace.coefs, design)
            errors[rep, i] = evaluate(raw, data.truth).l2_err
    out = []
    for i, lam in enumerate(lambdas):
        col = errors[:, i]
        sd = float(col.std(ddof=1)) if reps > 1 else 0.0
        out.append((lam, float(col.mean()), sd))
    return out


def select_lambda_for_sparsity(design, y, method: str, k: int, grid=None,
                               grid_size: int = 100,
                               opts: SolverOptions | None = None,
                               max_extra_solves: int = 20) -> tuple[float, FitOutcome]:
    """Find the penalty giving the densest fit with at most ``k`` nonzeros.

    Walks the descending grid keeping the best fit with NZ <= k (ties
    resolve to the smaller penalty, i.e. the least-shrunk fit); when a grid
    step first overshoots k, the bracketing interval is refined by
    geometric bisection using at most ``max_extra_solves`` extra fits.
    """
    if not 1 <= k <= min(design.n, design.p):
        raise ValueError("k must satisfy 1 <= k <= min(n, p)")
    if grid is None:
        grid = lambda_grid(design, y, grid_size)
    grid = np.asarray(grid, dtype=float)
    opts = opts or SolverOptions()

    best: tuple[int, float, FitOutcome] | None = None

    def consider(outcome: FitOutcome):
        nonlocal best
        nz = outcome.coefs.nnz
        if nz <= k and (best is None or nz >= best[0]):
            best = (nz, outcome.lam, outcome)

    base_warm = None
    crossing = None
    for i, lam in enumerate(grid):
        base = fit_lasso(design, y, float(lam),
                         SolverOptions(tol=opts.tol, max_sweeps=opts.max_sweeps,
                                       warm_start=base_warm))
        base_warm = base.coefs.values
        outcome = fit_method(method, design, y, float(lam), opts, base=base)
        if outcome.coefs.nnz > k:
            crossing = (float(grid[i - 1]), float(lam)) if i > 0 else (float(lam), float(lam))
            break
        consider(outcome)

    if crossing is not None and crossing[0] > crossing[1]:
        hi, lo = crossing  # hi: sparse side (nz <= k), lo: dense side (nz > k)
        for _ in range(max_extra_solves):
            mid = float(np.sqrt(hi * lo))
            if mid >= hi or mid <= lo:
                break
            outcome = fit_method(method, design, y, mid, opts,
                                 base=fit_lasso(design, y, mid,
                                                SolverOptions(tol=opts.tol,
                                                              max_sweeps=opts.max_sweeps,
                                                              warm_start=base_warm)))
            if outcome.coefs.nnz > k:
                lo = mid
            else:
                consider(outcome)
                hi = mid
    if best is None or best[0] == 0:
        raise ValueError("no penalty level on the grid selects any variable")
    return best[1], best[2]

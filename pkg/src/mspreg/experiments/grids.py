"""Penalty grids, path tracing, and cross-validation."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..data import Dataset, SparseCoefficients, destandardize, standardize
from ..estimators import (
    Mcp,
    Scad,
    fit_adaptive_lasso,
    fit_capped_l1,
    fit_lasso,
    fit_lla,
    fit_msp,
    fit_ols_post_lasso,
)
from ..solver import PenaltySpec, SolveReport, SolverOptions, lambda_max

__all__ = [
    "METHODS",
    "FitOutcome",
    "PathResult",
    "CVResult",
    "lambda_grid",
    "fit_method",
    "trace_path",
    "cross_validate",
    "classify_variables",
]

METHODS = ("msp", "lasso", "alasso", "plasso", "capped", "lla-scad", "lla-mcp")


@dataclass(frozen=True)
class FitOutcome:
    """Uniform wrapper around one estimator fit at one penalty level."""

    method: str
    lam: float
    coefs: SparseCoefficients
    steps: int
    converged: bool
    penalty: PenaltySpec


def lambda_grid(design, y, count: int = 100) -> np.ndarray:
    """Log-spaced descending grid from lambda_max down to 0.001*lambda_max."""
    if count < 2:
        raise ValueError("count must be at least 2")
    top = lambda_max(design, y)
    if top == 0:
        raise ValueError("lambda_max is zero: the response is orthogonal to every column")
    return np.geomspace(top, 1e-3 * top, count)


def fit_method(method: str, design, y, lam: float,
               opts: SolverOptions | None = None,
               base: SolveReport | None = None) -> FitOutcome:
    """Fit one named estimator at one penalty level.

    ``base`` may carry a precomputed plain-lasso solve at the same ``lam``,
    which every multi-step method here uses as its first step; path and
    cross-validation drivers share it to warm-start along the grid.
    The screened multi-step fit uses the single-penalty regime
    (first-step and reweighting penalties both equal to ``lam``).
    """
    opts = opts or SolverOptions()
    if method == "lasso":
        report = base if base is not None else fit_lasso(design, y, lam, opts)
        return FitOutcome(method, lam, report.coefs, 1, report.converged, report.penalty)
    if method == "msp":
        trace = fit_msp(design, y, lam, lam, opts, first_step=base)
        return FitOutcome(method, lam, trace.coefs, trace.steps_used, trace.converged,
                          trace.final_penalty)
    if method == "alasso":
        report = fit_adaptive_lasso(design, y, lam, opts, base=base)
        return FitOutcome(method, lam, report.coefs, 2, report.converged, report.penalty)
    if method == "plasso":
        report = fit_ols_post_lasso(design, y, lam, opts, base=base)
        return FitOutcome(method, lam, report.coefs, 2, report.converged, report.penalty)
    if method == "capped":
        warm = base.coefs.values if base is not None else None
        trace = fit_capped_l1(design, y, lam, opts=replace(opts, warm_start=warm))
        return FitOutcome(method, lam, trace.coefs, trace.steps_used, trace.converged,
                          trace.final_penalty)
    if method in ("lla-scad", "lla-mcp"):
        kind = Scad() if method == "lla-scad" else Mcp()
        init = base.coefs if base is not None else None
        trace = fit_lla(design, y, lam, kind, init=init, opts=opts)
        return FitOutcome(method, lam, trace.coefs, trace.steps_used, trace.converged,
                          trace.final_penalty)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


@dataclass(frozen=True)
class PathResult:
    """Estimator output over a descending penalty grid."""

    method: str
    lambdas: np.ndarray
    coefs: tuple[SparseCoefficients, ...]
    steps: tuple[int, ...]
    converged: tuple[bool, ...]

    def __post_init__(self):
        lambdas = np.asarray(self.lambdas, dtype=float)
        if lambdas.size != len(self.coefs):
            raise ValueError("one coefficient record per grid point required")
        if lambdas.size >= 2 and not (np.diff(lambdas) < 0).all():
            raise ValueError("grid must be strictly decreasing")
        object.__setattr__(self, "lambdas", lambdas)

    def support_sizes(self) -> np.ndarray:
        return np.array([c.nnz for c in self.coefs], dtype=np.intp)


def trace_path(dataset: Dataset, method: str, grid,
               opts: SolverOptions | None = None,
               center_response: bool = False) -> PathResult:
    """Fit ``method`` at every grid value, warm-starting along the grid."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    opts = opts or SolverOptions()
    design = standardize(dataset, center_response)
    y = design.y
    grid = np.asarray(grid, dtype=float)
    coefs: list[SparseCoefficients] = []
    steps: list[int] = []
    converged: list[bool] = []
    base_warm = None
    for i, lam in enumerate(grid):
        try:
            base = fit_lasso(design, y, float(lam), replace(opts, warm_start=base_warm))
            base_warm = base.coefs.values
            outcome = fit_method(method, design, y, float(lam), opts, base=base)
        except Exception as exc:
            raise RuntimeError(
                f"{method} fit failed at grid index {i} (lambda={lam:g})"
            ) from exc
        coefs.append(outcome.coefs)
        steps.append(outcome.steps)
        converged.append(outcome.converged)
    return PathResult(method, grid, tuple(coefs), tuple(steps), tuple(converged))


def classify_variables(p: int, truth_support, engineered=(0,)) -> list[str]:
    """Label variables as relevant / engineered / irrelevant for path output."""
    support = set(int(j) for j in np.asarray(truth_support).tolist())
    eng = set(int(j) for j in engineered)
    labels = []
    for j in range(p):
        if j in support:
            labels.append("relevant")
        elif j in eng:
            labels.append("engineered")
        else:
            labels.append("irrelevant")
    return labels


@dataclass(frozen=True)
class CVResult:
    """Cross-validation curve and the selected penalty level."""

    lam: float
    index: int
    lambdas: np.ndarray
    mean_errors: np.ndarray


def cv_error_curves(dataset: Dataset, methods, grid, folds: int = 10,
                    seed: int = 0, opts: SolverOptions | None = None,
                    center_response: bool = False) -> dict[str, np.ndarray]:
    """Held-out squared-error curves for several methods over one fold split.

    All methods share the same folds and the same warm-started base lasso
    chain per fold, so validating many methods costs little more than one.
    """
    methods = list(methods)
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ValueError(f"unknown methods: {unknown}")
    n = dataset.n
    if n < folds:
        raise ValueError("need at least one row per fold")
    grid = np.asarray(grid, dtype=float)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    blocks = np.array_split(rng.permutation(n), folds)
    if min(block.size for block in blocks) < 2:
        raise ValueError("every fold must contain at least 2 rows")
    sq_err = {m: np.zeros(grid.size) for m in methods}
    for block in blocks:
        train = np.setdiff1d(np.arange(n), block)
        sub = Dataset(x=dataset.x[train], y=dataset.y[train])
        design = standardize(sub, center_response)
        x_test = dataset.x[block]
        y_test = dataset.y[block]
        base_warm = None
        for i, lam in enumerate(grid):
            base = fit_lasso(design, design.y, float(lam), replace(opts or SolverOptions(),
                                                                   warm_start=base_warm))
            base_warm = base.coefs.values
            for method in methods:
                outcome = fit_method(method, design, design.y, float(lam), opts, base=base)
                raw = destandardize(outcome.coefs, design)
                pred = x_test @ raw.values + design.y_mean
                diff = y_test - pred
                sq_err[method][i] += float(diff @ diff)
    return {m: e / n for m, e in sq_err.items()}


def cross_validate(dataset: Dataset, method: str, grid, folds: int = 10,
                   seed: int = 0, opts: SolverOptions | None = None,
                   center_response: bool = False) -> CVResult:
    """Select the grid penalty minimizing held-out squared prediction error.

    Folds are contiguous blocks of a seeded permutation of the rows; exact
    ties in the error curve resolve to the larger penalty.
    """
    grid = np.asarray(grid, dtype=float)
    mean_errors = cv_error_curves(dataset, [method], grid, folds=folds, seed=seed,
                                  opts=opts, center_response=center_response)[method]
    index = int(np.argmin(mean_errors))  # first minimum = largest penalty on ties
    return CVResult(lam=float(grid[index]), index=index, lambdas=grid, mean_errors=mean_errors)

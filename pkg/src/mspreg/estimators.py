"""Sparse-regression estimators built on the weighted-lasso kernel.

The centerpiece is :func:`fit_msp`, a multi-step screened estimator: a
plain lasso pass at a small penalty, then repeated weighted solves that
are restricted to the previous active set with weights 1/|b_j| from the
previous iterate, until the active set and coefficients stop moving.
The other fitters (adaptive lasso, OLS-post-lasso, capped-l1, LLA with
SCAD or MCP weights) are thin policies over the same kernel, which keeps
their solutions directly comparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .data import SparseCoefficients, StandardizedDesign
from .solver import (
    PenaltySpec,
    SolveReport,
    SolverOptions,
    fit_weighted_lasso,
    kkt_check,
    lambda_max,
)

__all__ = [
    "FitTrace",
    "Scad",
    "Mcp",
    "PenaltyKind",
    "fit_lasso",
    "fit_msp",
    "fit_adaptive_lasso",
    "fit_ols_post_lasso",
    "fit_capped_l1",
    "fit_lla",
    "penalty_derivative",
    "default_lambdas",
    "estimate_noise_sd",
    "msp_default_lambda",
]

# Reciprocal weights are clamped here; coordinates eligible for reweighting
# always have nonzero previous values, so this is purely defensive.
MAX_WEIGHT = 1e12

# Stabilization defaults for the multi-step fitters: stop when the active
# set repeats and no coefficient moved more than STEP_TOL.
STEP_TOL = 1e-6
MSP_MAX_STEPS = 50
LLA_MAX_STEPS = 20
CAPPED_MAX_STEPS = 20

# Cross-validation-free penalty policy for the screened multi-step fit:
# lam = fraction * lambda_max.  The method's error is flat over a wide range
# of small penalties, so a fixed small fraction suffices.
MSP_LAMBDA_FRACTION = 0.002


@dataclass(frozen=True)
class FitTrace:
    """Per-step record of a multi-step fit.

    ``steps`` holds ``(active_set, coefficients)`` after each step; the last
    entry is the returned solution.  ``final_penalty`` is the penalty of the
    last kernel solve, so the result can be re-certified with `kkt_check`.
    """

    steps: tuple[tuple[np.ndarray, SparseCoefficients], ...]
    converged: bool
    steps_used: int
    final_penalty: PenaltySpec
    reports: tuple[SolveReport, ...] = ()

    def __post_init__(self):
        if len(self.steps) != self.steps_used:
            raise ValueError("steps_used must match the trace length")

    @property
    def coefs(self) -> SparseCoefficients:
        return self.steps[-1][1]

    @property
    def support(self) -> np.ndarray:
        return self.steps[-1][0]

    def active_sizes(self) -> list[int]:
        return [int(a.size) for a, _ in self.steps]


@dataclass(frozen=True)
class Scad:
    """Smoothly clipped absolute deviation penalty shape."""

    a: float = 3.0

    def __post_init__(self):
        if not self.a > 2:
            raise ValueError("SCAD requires a > 2")


@dataclass(frozen=True)
class Mcp:
    """Minimax concave penalty shape."""

    gamma: float = 3.7

    def __post_init__(self):
        if not self.gamma > 1:
            raise ValueError("MCP requires gamma > 1")


PenaltyKind = Union[Scad, Mcp]


def penalty_derivative(kind: PenaltyKind, beta_abs: float, lam: float) -> float:
    """Derivative of the concave penalty at |b| = beta_abs.

    SCAD: lam on [0, lam]; (a*lam - t)/(a - 1) on (lam, a*lam); 0 beyond.
    MCP: lam - t/gamma below gamma*lam; 0 beyond.
    """
    t = float(beta_abs)
    if t < 0:
        raise ValueError("beta_abs must be nonnegative")
    if isinstance(kind, Scad):
        if t <= lam:
            return float(lam)
        if t < kind.a * lam:
            return (kind.a * lam - t) / (kind.a - 1)
        return 0.0
    if isinstance(kind, Mcp):
        return float(lam - t / kind.gamma) if t < kind.gamma * lam else 0.0
    raise TypeError(f"unknown penalty kind {kind!r}")


def _derivative_weights(kind: PenaltyKind, abs_beta: np.ndarray, lam: float) -> np.ndarray:
    """Vectorized penalty_derivative(kind, ., lam) / lam over a coefficient vector."""
    t = np.abs(abs_beta)
    if isinstance(kind, Scad):
        mid = (kind.a * lam - t) / (kind.a - 1)
        d = np.where(t <= lam, lam, np.where(t < kind.a * lam, mid, 0.0))
    elif isinstance(kind, Mcp):
        d = np.where(t < kind.gamma * lam, lam - t / kind.gamma, 0.0)
    else:
        raise TypeError(f"unknown penalty kind {kind!r}")
    return d / lam


def fit_lasso(design: StandardizedDesign, y, lam0: float,
              opts: SolverOptions | None = None) -> SolveReport:
    """Unit-weight, unrestricted lasso solve at penalty level lam0."""
    if lam0 < 0:
        raise ValueError("lam0 must be nonnegative")
    return fit_weighted_lasso(design, y, PenaltySpec.unit(design.p, lam0), opts)


def _reciprocal_weights(p: int, values: np.ndarray, active: np.ndarray) -> np.ndarray:
    w = np.ones(p)
    w[active] = np.minimum(1.0 / np.abs(values[active]), MAX_WEIGHT)
    return w


def fit_msp(design: StandardizedDesign, y, lam0: float, lam: float,
            opts: SolverOptions | None = None, *, step_tol: float = STEP_TOL,
            max_steps: int = MSP_MAX_STEPS,
            first_step: SolveReport | None = None) -> FitTrace:
    """Multi-screen-penalty fit.

    Step 1 is a plain lasso at ``lam0``.  Every later step solves the
    weighted lasso at ``lam`` with weights 1/|b_j| from the previous step,
    restricted to the previous active set, so the active set can only
    shrink.  Iteration stops when the active set is unchanged and no
    coefficient moved more than ``step_tol``, or at ``max_steps`` (reported
    as ``converged=False``).

    ``first_step`` may supply a precomputed lasso solve at ``lam0`` (used
    for warm-started path tracing); it is trusted, not re-verified.
    """
    opts = opts or SolverOptions()
    base = first_step if first_step is not None else fit_lasso(design, y, lam0, opts)
    active = base.coefs.support
    steps = [(active, base.coefs)]
    reports = [base]
    if active.size == 0:
        return FitTrace(tuple(steps), True, 1, base.penalty, tuple(reports))

    prev = base.coefs.values
    converged = False
    penalty = base.penalty
    for _ in range(1, max_steps):
        penalty = PenaltySpec(
            lam=lam,
            weights=_reciprocal_weights(design.p, prev, active),
            restriction=active,
        )
        report = fit_weighted_lasso(design, y, penalty, replace(opts, warm_start=prev))
        new_active = report.coefs.support
        delta = float(np.max(np.abs(report.coefs.values - prev)))
        steps.append((new_active, report.coefs))
        reports.append(report)
        if new_active.size == active.size and np.array_equal(new_active, active) and delta <= step_tol:
            converged = True
            break
        active = new_active
        prev = report.coefs.values
        if active.size == 0:
            converged = True
            break
    return FitTrace(tuple(steps), converged, len(steps), penalty, tuple(reports))


def fit_adaptive_lasso(design: StandardizedDesign, y, lam: float,
                       opts: SolverOptions | None = None, *,
                       base: SolveReport | None = None) -> SolveReport:
    """Two-step adaptive lasso: lasso at ``lam``, then one weighted solve
    with weights 1/|b_j| restricted to the initial support."""
    opts = opts or SolverOptions()
    base = base if base is not None else fit_lasso(design, y, lam, opts)
    active = base.coefs.support
    if active.size == 0:
        return base
    penalty = PenaltySpec(
        lam=lam,
        weights=_reciprocal_weights(design.p, base.coefs.values, active),
        restriction=active,
    )
    return fit_weighted_lasso(design, y, penalty, replace(opts, warm_start=base.coefs.values))


def fit_ols_post_lasso(design: StandardizedDesign, y, lam: float,
                       opts: SolverOptions | None = None, *,
                       base: SolveReport | None = None) -> SolveReport:
    """Lasso at ``lam`` followed by an unpenalized least-squares refit on
    the selected support (dense solve; exact stationarity)."""
    opts = opts or SolverOptions()
    base = base if base is not None else fit_lasso(design, y, lam, opts)
    support = base.coefs.support
    if support.size == 0:
        return base
    if support.size > design.n:
        raise ValueError(
            f"lasso support of size {support.size} exceeds n={design.n}: refit is rank-deficient"
        )
    y = np.asarray(y, dtype=float)
    xs = design.x[:, support]
    refit, *_ = np.linalg.lstsq(xs, y, rcond=None)
    values = np.zeros(design.p)
    values[support] = refit
    coefs = SparseCoefficients.from_values(values)
    penalty = PenaltySpec(lam=0.0, weights=np.ones(design.p), restriction=support)
    return SolveReport(
        coefs=coefs,
        sweeps_used=0,
        converged=True,
        kkt_violation=kkt_check(design, y, penalty, coefs),
        penalty=penalty,
    )


def fit_capped_l1(design: StandardizedDesign, y, lam: float, cap: float = 1.0,
                  opts: SolverOptions | None = None, *,
                  max_steps: int = CAPPED_MAX_STEPS) -> FitTrace:
    """Capped-l1 fit by repeated convex relaxation.

    Starting from b = 0, each step solves an unrestricted weighted lasso
    with weight 1 on coordinates below ``cap`` in magnitude and 0 on the
    rest, until both the support and the weights repeat.
    """
    if not cap > 0:
        raise ValueError("cap must be positive")
    opts = opts or SolverOptions()
    weights = np.ones(design.p)  # reference point b = 0: everything below cap
    steps: list[tuple[np.ndarray, SparseCoefficients]] = []
    reports: list[SolveReport] = []
    converged = False
    penalty = PenaltySpec(lam=lam, weights=weights)
    warm = opts.warm_start
    for _ in range(max_steps):
        penalty = PenaltySpec(lam=lam, weights=weights)
        report = fit_weighted_lasso(design, y, penalty, replace(opts, warm_start=warm))
        values = report.coefs.values
        steps.append((report.coefs.support, report.coefs))
        reports.append(report)
        next_weights = (np.abs(values) < cap).astype(float)
        if len(steps) >= 2 and np.array_equal(next_weights, weights) and np.array_equal(
                steps[-1][0], steps[-2][0]):
            converged = True
            break
        weights = next_weights
        warm = values
    return FitTrace(tuple(steps), converged, len(steps), penalty, tuple(reports))


def fit_lla(design: StandardizedDesign, y, lam: float, kind: PenaltyKind,
            init: SparseCoefficients | None = None,
            opts: SolverOptions | None = None, *, step_tol: float = STEP_TOL,
            max_steps: int = LLA_MAX_STEPS) -> FitTrace:
    """Local linear approximation for a concave penalty (SCAD or MCP).

    Each step solves an unrestricted weighted lasso with weights
    ``penalty_derivative(kind, |b_j|, lam) / lam`` taken at the previous
    iterate; the default initializer is the plain lasso at the same
    ``lam``.  Stops when support and coefficients stabilize.
    """
    opts = opts or SolverOptions()
    if init is None:
        init = fit_lasso(design, y, lam, opts).coefs
    if init.values.shape[0] != design.p:
        raise ValueError("init length does not match the design")
    if lam == 0:
        report = fit_weighted_lasso(design, y, PenaltySpec(0.0, np.zeros(design.p)),
                                    replace(opts, warm_start=init.values))
        return FitTrace(((report.coefs.support, report.coefs),), True, 1,
                        report.penalty, (report,))

    prev = init.values
    prev_support = init.support
    steps: list[tuple[np.ndarray, SparseCoefficients]] = []
    reports: list[SolveReport] = []
    converged = False
    penalty = PenaltySpec(lam=lam, weights=np.ones(design.p))
    for _ in range(max_steps):
        penalty = PenaltySpec(lam=lam, weights=_derivative_weights(kind, prev, lam))
        report = fit_weighted_lasso(design, y, penalty, replace(opts, warm_start=prev))
        values = report.coefs.values
        delta = float(np.max(np.abs(values - prev))) if design.p else 0.0
        steps.append((report.coefs.support, report.coefs))
        reports.append(report)
        if np.array_equal(report.coefs.support, prev_support) and delta <= step_tol:
            converged = True
            break
        prev = values
        prev_support = report.coefs.support
    return FitTrace(tuple(steps), converged, len(steps), penalty, tuple(reports))


def default_lambdas(n: int, p: int, sigma: float, *, same: bool = False) -> tuple[float, float]:
    """Theory-scaled penalty pair for the screened multi-step fit.

    Returns ``(4*sigma*sqrt(n*log p), 4*sigma*sqrt(n*log n))`` on the
    (1/2)||.||^2 loss scale.  With ``same=True`` both entries equal the
    second value, the single-penalty regime appropriate when p grows
    polynomially in n.
    """
    if n < 2 or p < 2:
        raise ValueError("n and p must be at least 2")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    lam = 4.0 * sigma * math.sqrt(n * math.log(n))
    if same:
        return lam, lam
    return 4.0 * sigma * math.sqrt(n * math.log(p)), lam


def estimate_noise_sd(design: StandardizedDesign, y,
                      opts: SolverOptions | None = None) -> float:
    """Residual-sd noise estimate from a lasso fit at lambda_max / 10."""
    y = np.asarray(y, dtype=float)
    lam = lambda_max(design, y) / 10.0
    report = fit_lasso(design, y, lam, opts)
    resid = y - design.x[:, report.coefs.support] @ report.coefs.values[report.coefs.support]
    df = max(design.n - report.coefs.nnz, 1)
    return float(np.sqrt(resid @ resid / df))


def msp_default_lambda(design: StandardizedDesign, y,
                       fraction: float = MSP_LAMBDA_FRACTION) -> float:
    """Fixed small penalty for cross-validation-free multi-screen fits."""
    if not 0 < fraction <= 1:
        raise ValueError("fraction must be in (0, 1]")
    return fraction * lambda_max(design, y)

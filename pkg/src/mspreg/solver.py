"""Weighted-l1 least squares by cyclic coordinate descent.

Objective convention (no 1/n factor):

    (1/2) * ||y - X b||^2 + lam * sum_j w_j |b_j|

optionally with every coordinate outside a restriction set pinned to zero.
A weight of zero leaves that coordinate unpenalized.  The hot loop lives in
the compiled extension ``mspreg._cdcore``; a pure-NumPy twin with identical
semantics is selected at import when the extension is unavailable or when
the environment variable ``MSPREG_PURE_KERNEL`` is set.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from . import _cdpure
from .data import SparseCoefficients, StandardizedDesign

__all__ = [
    "PenaltySpec",
    "SolverOptions",
    "SolveReport",
    "soft_threshold",
    "lambda_max",
    "fit_weighted_lasso",
    "solve_weighted_lasso",
    "kkt_check",
    "kkt_check_raw",
    "kernel_name",
    "kernel_override",
]

# The report's KKT residual must come in under this multiple of the sweep
# tolerance before a solve may declare convergence.
KKT_TOL_FACTOR = 10.0

# Between coordinate-descent bursts, the wrapper tries an exact solve of the
# sign-fixed linear system on the current support (skipped above this support
# size, or whenever the step is not provably a descent).  Bursts start short
# so easy problems reach the accelerator quickly, then grow geometrically so
# the per-burst full pass over all columns amortizes on hard problems.
ACCEL_BURST_SWEEPS = 10
ACCEL_BURST_MAX = 640
ACCEL_SUPPORT_CAP = 400

try:
    from . import _cdcore
except ImportError:  # extension not built; fall back to the slow twin
    _cdcore = None

if _cdcore is None or os.environ.get("MSPREG_PURE_KERNEL"):
    _kernel = _cdpure
else:
    _kernel = _cdcore


def kernel_name() -> str:
    """Name of the coordinate-descent kernel in use ('compiled' or 'pure')."""
    return _kernel.KERNEL_NAME


@contextmanager
def kernel_override(name: str):
    """Temporarily force a specific kernel; used by tests and benchmarks."""
    global _kernel
    table = {"pure": _cdpure, "compiled": _cdcore}
    if name not in table:
        raise ValueError(f"unknown kernel {name!r}")
    if table[name] is None:
        raise RuntimeError("compiled kernel is not available")
    previous = _kernel
    _kernel = table[name]
    try:
        yield
    finally:
        _kernel = previous


@dataclass(frozen=True)
class PenaltySpec:
    """Penalty level, per-coefficient weights, and an optional restriction.

    Coordinates outside ``restriction`` (when given) are pinned to zero and
    carry no stationarity requirement.
    """

    lam: float
    weights: np.ndarray
    restriction: np.ndarray | None = None

    def __post_init__(self):
        if not np.isfinite(self.lam) or self.lam < 0:
            raise ValueError("lam must be a finite nonnegative number")
        weights = np.array(self.weights, dtype=float, copy=True)
        weights.setflags(write=False)
        if weights.ndim != 1:
            raise ValueError("weights must be a 1-d vector")
        if (weights < 0).any() or np.isnan(weights).any():
            raise ValueError("weights must be nonnegative")
        object.__setattr__(self, "weights", weights)
        if self.restriction is not None:
            restriction = np.unique(np.asarray(self.restriction, dtype=np.intp))
            restriction.setflags(write=False)
            p = weights.shape[0]
            if restriction.size and (restriction[0] < 0 or restriction[-1] >= p):
                raise ValueError("restriction indices out of range")
            object.__setattr__(self, "restriction", restriction)

    @classmethod
    def unit(cls, p: int, lam: float) -> "PenaltySpec":
        return cls(lam=float(lam), weights=np.ones(p))

    @property
    def p(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class SolverOptions:
    """Convergence controls for a single coordinate-descent solve."""

    tol: float = 1e-7
    max_sweeps: int = 10_000
    warm_start: np.ndarray | None = None
    record_objective: bool = False

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one weighted-lasso solve.

    ``converged`` guarantees ``kkt_violation <= 10 * tol``; non-convergence
    is a reported state rather than an exception so multi-step callers can
    decide their own policy.
    """

    coefs: SparseCoefficients
    sweeps_used: int
    converged: bool
    kkt_violation: float
    penalty: PenaltySpec
    objective_trace: tuple[float, ...] | None = None


def soft_threshold(z, t):
    """sign(z) * max(|z| - t, 0), the proximal map of t*|.|."""
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)


# Relative headroom added to lambda_max so the zero vector stays optimal in
# the kernel even when its dot products round differently than BLAS.
_LAMBDA_MAX_SLACK = 1.0 + 64.0 * np.finfo(float).eps


def lambda_max(design: StandardizedDesign, y, weights=None) -> float:
    """Smallest penalty level at which the all-zero vector is optimal.

    Returns max_j |X_j' y| / w_j (plus a few ulps of headroom).  Weights
    must be strictly positive and finite; unit weights are assumed when
    omitted.
    """
    y = np.asarray(y, dtype=float)
    grad = np.abs(design.x.T @ y)
    if weights is None:
        return float(grad.max() * _LAMBDA_MAX_SLACK)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != grad.shape:
        raise ValueError("weights length does not match the number of columns")
    if not ((weights > 0) & np.isfinite(weights)).all():
        raise ValueError("weights must be strictly positive and finite")
    return float((grad / weights).max() * _LAMBDA_MAX_SLACK)


def _prepare(x, y, penalty, opts):
    x = np.asfortranarray(x, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    n, p = x.shape
    if y.shape != (n,):
        raise ValueError(f"y has length {y.shape[0] if y.ndim else 0}, expected {n}")
    if penalty.p != p:
        raise ValueError("penalty weights length does not match the design")
    if not np.isfinite(y).all():
        raise ValueError("y contains non-finite entries")
    active = penalty.restriction if penalty.restriction is not None else np.arange(p, dtype=np.intp)
    active = np.ascontiguousarray(active, dtype=np.intp)
    if active.size and not np.isfinite(penalty.weights[active]).all():
        raise ValueError("weights must be finite on the restriction set")
    beta = np.zeros(p)
    if opts.warm_start is not None:
        ws = np.asarray(opts.warm_start, dtype=float)
        if ws.shape != (p,):
            raise ValueError("warm_start length does not match the design")
        beta[active] = ws[active]  # entries outside the restriction stay pinned at zero
    nz = np.flatnonzero(beta)
    resid = y - x[:, nz] @ beta[nz] if nz.size else y.copy()
    return x, y, beta, resid, active


def _objective(resid, beta, lam, weights, active):
    pen = lam * float(weights[active] @ np.abs(beta[active])) if active.size else 0.0
    return 0.5 * float(resid @ resid) + pen


def _try_subspace_newton(x, y, beta, resid, lam, weights, active, trace,
                         min_mag: float = 0.0) -> bool:
    """Jump to the exact minimizer over a sign-fixed block of the support.

    Coordinate descent crawls when the penalty is small and the support is
    dense (its sweep count scales with the Gram condition number), while the
    sign-fixed subproblem is just a linear system.  With ``min_mag > 0`` only
    coordinates above that magnitude move (the near-zero ones, whose signs
    are unstable, stay fixed).  The step is accepted only when the solved
    signs match and the objective does not increase, so the solve stays a
    monotone descent and every reported certificate is still earned by the
    kernel afterwards.  Returns whether the step was accepted.
    """
    nonzero = np.flatnonzero(beta)
    block = nonzero[np.abs(beta[nonzero]) > min_mag] if min_mag > 0 else nonzero
    n = x.shape[0]
    if not 0 < block.size <= min(n, ACCEL_SUPPORT_CAP):
        return False
    fixed = np.setdiff1d(nonzero, block, assume_unique=True)
    y_eff = y - x[:, fixed] @ beta[fixed] if fixed.size else y
    xs = x[:, block]
    signs = np.sign(beta[block])
    rhs = xs.T @ y_eff - lam * weights[block] * signs
    try:
        sol = cho_solve(cho_factor(xs.T @ xs), rhs)
    except LinAlgError:
        return False
    if not np.isfinite(sol).all() or not (np.sign(sol) == signs).all():
        return False
    new_resid = y_eff - xs @ sol
    before = _objective(resid, beta, lam, weights, active)
    new_beta = beta.copy()
    new_beta[block] = sol
    after = _objective(new_resid, new_beta, lam, weights, active)
    if after > before + 1e-12 * max(1.0, abs(before)):
        return False
    beta[block] = sol
    resid[:] = new_resid
    if trace is not None:
        trace.append(after)
    return True


def solve_weighted_lasso(x, y, penalty: PenaltySpec, opts: SolverOptions | None = None,
                         col_sq=None) -> SolveReport:
    """Array-level solve; ``x`` need not be standardized."""
    opts = opts or SolverOptions()
    x, y, beta, resid, active = _prepare(x, y, penalty, opts)
    if col_sq is None:
        col_sq = np.einsum("ij,ij->j", x, x)
    col_sq = np.ascontiguousarray(col_sq, dtype=float)
    lam = float(penalty.lam)
    kkt_target = KKT_TOL_FACTOR * float(opts.tol)
    trace: list[float] | None = [] if opts.record_objective else None

    total_sweeps = 0
    converged = False
    kkt = np.inf
    remaining = int(opts.max_sweeps)
    burst = ACCEL_BURST_SWEEPS
    stalls = 0
    while remaining > 0:
        budget = min(burst, remaining)
        sweeps, converged, kkt, burst_trace = _kernel.cd_solve(
            x, y, resid, beta, col_sq, lam, penalty.weights, active,
            float(opts.tol), budget, kkt_target, opts.record_objective,
        )
        total_sweeps += int(sweeps)
        remaining -= int(sweeps)
        if trace is not None and burst_trace:
            trace.extend(burst_trace)
        if converged:
            break
        # sweeps < budget means the kernel went sweep-stable without meeting
        # the KKT target: coordinate moves alone cannot close the gap
        stalled = sweeps < budget
        moved = False
        if remaining > 0:
            moved = _try_subspace_newton(x, y, beta, resid, lam, penalty.weights,
                                         active, trace)
            if not moved and stalled:
                moved = _try_subspace_newton(x, y, beta, resid, lam, penalty.weights,
                                             active, trace,
                                             min_mag=100.0 * float(opts.tol))
        if stalled and not moved:
            stalls += 1
            if stalls >= 3:
                break  # honest non-convergence; kkt already measured
        else:
            stalls = 0
        burst = min(burst * 2, ACCEL_BURST_MAX)

    if not np.isfinite(beta).all():
        raise FloatingPointError("coordinate descent produced non-finite coefficients")
    if trace is not None and len(trace) > 1:
        diffs = np.diff(trace)
        slack = 1e-9 * max(1.0, abs(trace[0]))
        assert (diffs <= slack).all(), "objective increased across a sweep"
    return SolveReport(
        coefs=SparseCoefficients.from_values(beta),
        sweeps_used=total_sweeps,
        converged=bool(converged),
        kkt_violation=float(kkt),
        penalty=penalty,
        objective_trace=tuple(trace) if trace is not None else None,
    )


def fit_weighted_lasso(design: StandardizedDesign, y, penalty: PenaltySpec,
                       opts: SolverOptions | None = None) -> SolveReport:
    """Solve the weighted lasso on a standardized design.

    Parameters
    ----------
    design : StandardizedDesign
        Columns with unit second moment; squared norms are reused from it.
    y : array of length n
        Response; passed explicitly so callers may reuse one design against
        several responses.
    penalty : PenaltySpec
        lam, per-coefficient weights, optional restriction set.
    opts : SolverOptions, optional
        Tolerance, sweep cap, warm start.
    """
    return solve_weighted_lasso(design.x, y, penalty, opts, col_sq=design.col_sq)


def kkt_check_raw(x, y, penalty: PenaltySpec, coefs: SparseCoefficients) -> float:
    """Stationarity residual of ``coefs``, computed with dense NumPy ops.

    Deliberately independent of the coordinate-descent kernels so it can
    certify their output.  Active coordinates contribute
    |X_j'(y - Xb) - lam*w_j*sign(b_j)|, inactive unrestricted ones
    max(|X_j'(y - Xb)| - lam*w_j, 0); restricted-out coordinates are pinned
    and contribute nothing.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    values = coefs.values
    if values.shape[0] != x.shape[1]:
        raise ValueError("coefficient length does not match the design")
    resid = y - x[:, coefs.support] @ values[coefs.support] if coefs.nnz else y.copy()
    active = penalty.restriction if penalty.restriction is not None else np.arange(x.shape[1])
    if active.size == 0:
        return 0.0
    grad = x[:, active].T @ resid
    thr = penalty.lam * penalty.weights[active]
    b = values[active]
    viol = np.where(
        b != 0.0,
        np.abs(grad - thr * np.sign(b)),
        np.maximum(np.abs(grad) - thr, 0.0),
    )
    return float(viol.max())


def kkt_check(design: StandardizedDesign, y, penalty: PenaltySpec,
              coefs: SparseCoefficients) -> float:
    """`kkt_check_raw` on a standardized design."""
    return kkt_check_raw(design.x, y, penalty, coefs)

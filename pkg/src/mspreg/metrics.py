"""Estimation-error and selection-accuracy measures."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .data import SparseCoefficients, TruthInfo

__all__ = ["EvalReport", "evaluate", "summarize", "summary_strings", "write_table_csv"]

SUMMARY_FIELDS = ("l2_err", "l1_err", "nz", "fpr", "tpr", "sign_consistent")

# Table column order used by the CSV emitter.
TABLE_COLUMNS = (("l2", "l2_err"), ("l1", "l1_err"), ("NZ", "nz"), ("FPR", "fpr"), ("TPR", "tpr"))


@dataclass(frozen=True)
class EvalReport:
    """Accuracy of one estimate against the ground truth."""

    l2_err: float
    l1_err: float
    nz: int
    fpr: float
    tpr: float
    sign_consistent: bool


def evaluate(estimate: SparseCoefficients, truth: TruthInfo) -> EvalReport:
    """Coordinate-exact selection and error measures.

    A coefficient counts as nonzero only when stored as exactly nonzero
    (the solver produces exact zeros), with no epsilon thresholding.
    """
    est = estimate.values
    beta = truth.beta
    if est.shape != beta.shape:
        raise ValueError("estimate and truth lengths differ")
    true_nz = beta != 0
    est_nz = est != 0
    n_true = int(true_nz.sum())
    n_null = beta.size - n_true
    if n_true == 0:
        raise ValueError("tpr undefined: truth has no nonzero coefficients")
    if n_null == 0:
        raise ValueError("fpr undefined: truth has no zero coefficients")
    diff = est - beta
    return EvalReport(
        l2_err=float(np.linalg.norm(diff)),
        l1_err=float(np.abs(diff).sum()),
        nz=int(est_nz.sum()),
        fpr=float((est_nz & ~true_nz).sum() / n_null),
        tpr=float((est_nz & true_nz).sum() / n_true),
        sign_consistent=bool(np.all(np.sign(est) == np.sign(beta))),
    )


def summarize(reports) -> dict[str, tuple[float, float]]:
    """Per-field mean and sample standard deviation over replications."""
    reports = list(reports)
    if not reports:
        raise ValueError("cannot summarize an empty list of reports")
    out = {}
    for field in SUMMARY_FIELDS:
        vals = np.array([float(getattr(r, field)) for r in reports])
        if vals.size > 1 and np.ptp(vals) > 0.0:
            sd = float(vals.std(ddof=1))
        else:
            sd = 0.0
        out[field] = (float(vals.mean()), sd)
    return out


def summary_strings(summary: dict[str, tuple[float, float]], decimals: int = 4) -> dict[str, str]:
    """Render a summary as ``"mean (sd)"`` strings."""
    return {f: f"{m:.{decimals}f} ({s:.{decimals}f})" for f, (m, s) in summary.items()}


def write_table_csv(rows: dict[str, dict[str, tuple[float, float]]], path,
                    footer_lines=()) -> None:
    """Emit a benchmark table: one row per method, columns l2 l1 NZ FPR TPR."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method"] + [name for name, _ in TABLE_COLUMNS])
        for method, summary in rows.items():
            rendered = summary_strings(summary)
            writer.writerow([method] + [rendered[field] for _, field in TABLE_COLUMNS])
        for line in footer_lines:
            fh.write(f"# {line}\n")

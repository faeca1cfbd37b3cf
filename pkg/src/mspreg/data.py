"""Numeric data model: datasets, column standardization, sparse coefficients.

Every container here is immutable after construction (arrays are marked
read-only), so instances can be shared across worker processes without
copying or locking.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import pandas as pd

__all__ = [
    "Dataset",
    "TruthInfo",
    "StandardizedDesign",
    "SparseCoefficients",
    "standardize",
    "destandardize",
    "load_dataset_csv",
    "save_dataset_csv",
]


def _frozen(values, dtype=float, order=None) -> np.ndarray:
    arr = np.array(values, dtype=dtype, order=order, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TruthInfo:
    """Ground-truth coefficients, their support, and the noise level."""

    beta: np.ndarray
    support: np.ndarray
    sigma: float

    def __post_init__(self):
        beta = _frozen(self.beta)
        support = _frozen(np.sort(np.asarray(self.support, dtype=np.intp)), dtype=np.intp)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "support", support)
        if not np.array_equal(support, np.flatnonzero(beta != 0)):
            raise ValueError("support must be exactly the nonzero index set of beta")
        if not np.isfinite(self.sigma) or self.sigma <= 0:
            raise ValueError("sigma must be a positive finite number")

    @classmethod
    def from_beta(cls, beta, sigma: float) -> "TruthInfo":
        beta = np.asarray(beta, dtype=float)
        return cls(beta=beta, support=np.flatnonzero(beta != 0), sigma=float(sigma))

    @property
    def q(self) -> int:
        """Number of nonzero true coefficients."""
        return int(self.support.size)


@dataclass(frozen=True)
class Dataset:
    """Design matrix (n x p) and response vector, optionally with ground truth."""

    x: np.ndarray
    y: np.ndarray
    truth: TruthInfo | None = None

    def __post_init__(self):
        x = _frozen(self.x)
        y = _frozen(self.y)
        if x.ndim != 2:
            raise ValueError("x must be a 2-d matrix")
        if y.ndim != 1:
            raise ValueError("y must be a 1-d vector")
        n, p = x.shape
        if n < 1 or p < 1:
            raise ValueError("x must have at least one row and one column")
        if y.shape[0] != n:
            raise ValueError(f"y has length {y.shape[0]}, expected {n}")
        if not np.isfinite(x).all() or not np.isfinite(y).all():
            raise ValueError("data contains non-finite entries")
        if self.truth is not None and self.truth.beta.shape[0] != p:
            raise ValueError("truth.beta length does not match the number of predictors")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class StandardizedDesign:
    """Design whose columns have unit empirical second moment.

    ``x`` satisfies (1/n) * x[:, j] @ x[:, j] == 1 for every column and is
    stored Fortran-ordered so the solver can walk columns contiguously.
    ``scales`` holds the positive factors each raw column was divided by;
    ``y`` is the response (mean-removed when ``y_centered``), with the
    removed mean kept in ``y_mean``.
    """

    x: np.ndarray
    scales: np.ndarray
    y: np.ndarray
    y_mean: float = 0.0
    y_centered: bool = False

    def __post_init__(self):
        x = np.array(self.x, dtype=float, order="F", copy=True)
        x.setflags(write=False)
        scales = _frozen(self.scales)
        y = _frozen(self.y)
        if x.ndim != 2 or scales.shape != (x.shape[1],) or y.shape != (x.shape[0],):
            raise ValueError("inconsistent design shapes")
        if not (scales > 0).all():
            raise ValueError("scales must be strictly positive")
        second = np.einsum("ij,ij->j", x, x) / x.shape[0]
        if np.max(np.abs(second - 1.0)) > 1e-10:
            raise ValueError("columns do not have unit second moment")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    @cached_property
    def col_sq(self) -> np.ndarray:
        """Exact squared column norms, precomputed once for the solver."""
        out = np.einsum("ij,ij->j", self.x, self.x)
        out.setflags(write=False)
        return out


@dataclass(frozen=True)
class SparseCoefficients:
    """Coefficient vector together with its exact nonzero index set."""

    values: np.ndarray
    support: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        support = _frozen(np.sort(np.asarray(self.support, dtype=np.intp)), dtype=np.intp)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "support", support)
        if values.ndim != 1:
            raise ValueError("values must be a 1-d vector")
        if not np.array_equal(support, np.flatnonzero(values != 0)):
            raise ValueError("support must be exactly the nonzero index set of values")

    @classmethod
    def from_values(cls, values) -> "SparseCoefficients":
        values = np.asarray(values, dtype=float)
        return cls(values=values, support=np.flatnonzero(values != 0))

    @classmethod
    def zeros(cls, p: int) -> "SparseCoefficients":
        return cls.from_values(np.zeros(p))

    @property
    def nnz(self) -> int:
        return int(self.support.size)


def standardize(data: Dataset, center_response: bool = False) -> StandardizedDesign:
    """Scale each column of the design to unit empirical second moment.

    Columns are divided by sqrt((1/n) * ||x_j||^2); no centering of the
    predictors is performed.  With ``center_response`` the response mean is
    removed and recorded so predictions can be shifted back.

    Raises
    ------
    ValueError
        If some column is identically zero (names the column index).
    """
    x = np.asarray(data.x, dtype=float)
    n = x.shape[0]
    second = np.einsum("ij,ij->j", x, x) / n
    dead = np.flatnonzero(second == 0.0)
    if dead.size:
        raise ValueError(f"column {int(dead[0])} is identically zero and cannot be standardized")
    scales = np.sqrt(second)
    x_std = x / scales
    y = np.asarray(data.y, dtype=float)
    y_mean = float(y.mean()) if center_response else 0.0
    return StandardizedDesign(
        x=x_std,
        scales=scales,
        y=y - y_mean,
        y_mean=y_mean,
        y_centered=bool(center_response),
    )


def destandardize(coefs: SparseCoefficients, design: StandardizedDesign) -> SparseCoefficients:
    """Map coefficients fitted on the scaled design back to the raw scale."""
    if coefs.values.shape[0] != design.p:
        raise ValueError(
            f"coefficient length {coefs.values.shape[0]} does not match design width {design.p}"
        )
    return SparseCoefficients.from_values(coefs.values / design.scales)


def save_dataset_csv(data: Dataset, path) -> None:
    """Write a dataset as CSV: predictor columns x1..xp followed by y."""
    frame = pd.DataFrame(data.x, columns=[f"x{j + 1}" for j in range(data.p)])
    frame["y"] = data.y
    frame.to_csv(path, index=False, float_format="%.17g")


def load_dataset_csv(path) -> Dataset:
    """Read a dataset CSV; requires a ``y`` column and rejects missing cells."""
    frame = pd.read_csv(path)
    if "y" not in frame.columns:
        raise ValueError("dataset CSV must contain a response column named 'y'")
    if frame.isna().any().any():
        raise ValueError("dataset CSV contains missing cells")
    y = frame.pop("y").to_numpy(dtype=float)
    return Dataset(x=frame.to_numpy(dtype=float), y=y)

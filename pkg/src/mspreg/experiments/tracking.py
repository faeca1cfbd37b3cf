"""Index tracking with sparse baskets over rolling windows.

Each window regresses the index price on the constituent stock prices
(train block), picks the penalty that selects at most ``k`` stocks, then
re-estimates the selected weights by unpenalized least squares so the
basket itself is unbiased.  Both response and predictors are mean-centered
within the window and the offset is restored in the replicated price, so
the fit behaves like a no-intercept model on de-meaned prices.  Tracking
quality is the annualized standard deviation of daily return errors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from ..data import Dataset, SparseCoefficients, destandardize, standardize
from ..solver import SolverOptions, lambda_max
from .bench import select_lambda_for_sparsity

__all__ = [
    "TrackingWindow",
    "tracking_error",
    "simple_returns",
    "track_index",
    "load_prices_csv",
    "synthetic_prices",
]

TRADING_DAYS = 252
TRAIN_LEN = 100
TEST_LEN = 20


@dataclass(frozen=True)
class TrackingWindow:
    """One rolling train/test window with its fitted basket and errors."""

    index: int
    train_start: int
    test_start: int
    test_end: int
    lam: float
    weights: SparseCoefficients
    intercept: float
    nz: int
    fitted_error: float
    predicted_error: float


def tracking_error(actual_returns, predicted_returns) -> float:
    """Annualized sd of daily return errors: sqrt(252) * sd(r - r_hat)."""
    actual = np.asarray(actual_returns, dtype=float)
    predicted = np.asarray(predicted_returns, dtype=float)
    if actual.shape != predicted.shape:
        raise ValueError("return series lengths differ")
    if actual.size < 2:
        raise ValueError("need at least 2 return observations")
    err = actual - predicted
    return float(np.sqrt(TRADING_DAYS) * err.std(ddof=1))


def simple_returns(prices) -> np.ndarray:
    """Daily simple returns (P_t - P_{t-1}) / P_{t-1} along the first axis."""
    prices = np.asarray(prices, dtype=float)
    return np.diff(prices, axis=0) / prices[:-1]


def _fit_window(x_train, y_train, method, k, grid_size, opts, refit):
    """Sparse basket fit on one window; returns (lam, beta_raw, intercept, nz)."""
    col_means = x_train.mean(axis=0)
    x_c = x_train - col_means
    y_mean = float(y_train.mean())
    keep = np.flatnonzero(np.einsum("ij,ij->j", x_c, x_c) > 0.0)
    p = x_train.shape[1]
    beta = np.zeros(p)
    if keep.size == 0 or not np.any(y_train != y_mean):
        # nothing to fit: constant stocks or constant index
        return 0.0, beta, y_mean, 0
    design = standardize(Dataset(x=x_c[:, keep], y=y_train), center_response=True)
    if lambda_max(design, design.y) == 0.0:
        return 0.0, beta, y_mean, 0
    lam, outcome = select_lambda_for_sparsity(design, design.y, method, k,
                                              grid_size=grid_size, opts=opts)
    raw = destandardize(outcome.coefs, design)
    sub_beta = raw.values
    if refit and raw.nnz:
        picked = raw.support
        refit_vals, *_ = np.linalg.lstsq(x_c[:, keep][:, picked], y_train - y_mean, rcond=None)
        sub_beta = np.zeros(keep.size)
        sub_beta[picked] = refit_vals
    beta[keep] = sub_beta
    intercept = y_mean - float(col_means @ beta)
    return lam, beta, intercept, int(np.count_nonzero(beta))


def track_index(index_prices, stock_prices, method: str = "msp", k: int = 20,
                train_len: int = TRAIN_LEN, test_len: int = TEST_LEN,
                n_windows: int | None = None, grid_size: int = 100,
                opts: SolverOptions | None = None, refit: bool = True
                ) -> list[TrackingWindow]:
    """Run the rolling-window tracking pipeline.

    Windows advance by ``test_len`` days with train and test adjacent, so
    test periods tile the sample without overlap.  Returns are computed
    within each segment (no boundary crossing).
    """
    y = np.asarray(index_prices, dtype=float)
    x = np.asarray(stock_prices, dtype=float)
    if x.ndim != 2 or y.ndim != 1 or x.shape[0] != y.shape[0]:
        raise ValueError("stock_prices must be (days, stocks) aligned with index_prices")
    if (y <= 0).any() or (x <= 0).any():
        raise ValueError("prices must be strictly positive")
    days = y.shape[0]
    if days < train_len + test_len:
        raise ValueError("not enough days for a single window")
    max_windows = (days - train_len - test_len) // test_len + 1
    if n_windows is None:
        n_windows = max_windows
    if n_windows > max_windows:
        raise ValueError(f"requested {n_windows} windows but only {max_windows} fit")

    windows = []
    for w in range(n_windows):
        a = w * test_len
        b = a + train_len
        c = b + test_len
        lam, beta, intercept, nz = _fit_window(x[a:b], y[a:b], method, k, grid_size,
                                               opts, refit)
        replicated_train = x[a:b] @ beta + intercept
        replicated_test = x[b:c] @ beta + intercept
        fitted = tracking_error(simple_returns(y[a:b]), simple_returns(replicated_train))
        predicted = tracking_error(simple_returns(y[b:c]), simple_returns(replicated_test))
        windows.append(TrackingWindow(
            index=w, train_start=a, test_start=b, test_end=c, lam=lam,
            weights=SparseCoefficients.from_values(beta), intercept=intercept,
            nz=nz, fitted_error=fitted, predicted_error=predicted,
        ))
    return windows


def load_prices_csv(path) -> tuple[pd.DatetimeIndex, np.ndarray, np.ndarray, list[str]]:
    """Read a price CSV: date column, ``index`` column, then stock tickers.

    Dates must be ISO-8601 and strictly increasing; missing cells are
    rejected.  Returns (dates, index prices, stock price matrix, tickers).
    """
    frame = pd.read_csv(path)
    if frame.shape[1] < 3:
        raise ValueError("price CSV needs a date column, an 'index' column, and stocks")
    date_col = frame.columns[0]
    if date_col != "date":
        raise ValueError("first column of the price CSV must be named 'date'")
    if "index" not in frame.columns:
        raise ValueError("price CSV must contain an 'index' column")
    if frame.isna().any().any():
        raise ValueError("price CSV contains missing cells")
    dates = pd.to_datetime(frame.pop("date"), format="ISO8601")
    if not dates.is_monotonic_increasing or dates.duplicated().any():
        raise ValueError("dates must be strictly increasing")
    index_prices = frame.pop("index").to_numpy(dtype=float)
    tickers = list(frame.columns)
    return pd.DatetimeIndex(dates), index_prices, frame.to_numpy(dtype=float), tickers


def synthetic_prices(n_days: int, n_stocks: int, seed: int = 0,
                     planted_weights=None, noise_rel: float = 0.0,
                     daily_vol: float = 0.01, start: str = "2016-01-04") -> pd.DataFrame:
    """Geometric-random-walk stock prices with a planted or averaged index.

    With ``planted_weights`` the index is that exact linear combination of
    stock prices, optionally perturbed multiplicatively by
    ``noise_rel``-sized relative noise; otherwise it is the equal-weight
    average.  Output matches the ``load_prices_csv`` schema.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    levels = rng.uniform(20.0, 200.0, size=n_stocks)
    shocks = rng.standard_normal((n_days, n_stocks)) * daily_vol
    log_prices = np.log(levels) + np.cumsum(shocks - 0.5 * daily_vol**2, axis=0)
    stocks = np.exp(log_prices)
    if planted_weights is None:
        index = stocks.mean(axis=1)
    else:
        weights = np.asarray(planted_weights, dtype=float)
        if weights.shape != (n_stocks,):
            raise ValueError("planted_weights length must equal n_stocks")
        index = stocks @ weights
    if noise_rel:
        index = index * (1.0 + noise_rel * rng.standard_normal(n_days))
    dates = pd.bdate_range(start, periods=n_days)
    frame = pd.DataFrame({"date": dates.strftime("%Y-%m-%d"), "index": index})
    for j in range(n_stocks):
        frame[f"s{j + 1:04d}"] = stocks[:, j]
    return frame

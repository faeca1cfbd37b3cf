"""Shared fixtures and independent oracles used across the test suite."""

from itertools import combinations

import numpy as np
import pytest

from mspreg import Dataset, standardize


def orthonormal_design(n, p, rng):
    """Design with X'X = n*I exactly (columns from a QR factor, scaled)."""
    q, _ = np.linalg.qr(rng.standard_normal((n, p)))
    return np.sqrt(n) * q[:, :p]


def soft_threshold_oracle(z, t):
    """Piecewise definition, written independently of the solver module."""
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


def closed_form_orthonormal(x, y, lam, weights=None):
    """Exact weighted-lasso solution when X'X = n*I: soft(X_j'y, lam*w_j)/n."""
    n, p = x.shape
    w = np.ones(p) if weights is None else np.asarray(weights, dtype=float)
    g = x.T @ y
    return np.array([soft_threshold_oracle(g[j], lam * w[j]) for j in range(p)]) / n


def ols_oracle(x, y):
    """Least-squares fit by normal equations (lstsq for rank safety)."""
    coef, *_ = np.linalg.lstsq(x, y, rcond=None)
    return coef


def best_subset_ols(x, y, size):
    """Exhaustive best-subset search at a fixed support size."""
    n, p = x.shape
    best_rss = np.inf
    best = ()
    for subset in combinations(range(p), size):
        cols = x[:, list(subset)]
        coef, *_ = np.linalg.lstsq(cols, y, rcond=None)
        resid = y - cols @ coef
        rss = float(resid @ resid)
        if rss < best_rss:
            best_rss = rss
            best = subset
    return np.array(best, dtype=np.intp)


def gaussian_instance(n, p, support, values, sigma, rng):
    """Plain i.i.d. Gaussian design with a planted sparse signal."""
    x = rng.standard_normal((n, p))
    beta = np.zeros(p)
    beta[np.asarray(support, dtype=np.intp)] = values
    y = x @ beta + sigma * rng.standard_normal(n)
    return x, y, beta


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_design(rng):
    """Well-conditioned 40x10 standardized design with a 3-sparse signal."""
    x, y, beta = gaussian_instance(40, 10, [1, 2, 3], [1.5, -2.0, 0.8], 0.1, rng)
    design = standardize(Dataset(x=x, y=y))
    return design, y, beta

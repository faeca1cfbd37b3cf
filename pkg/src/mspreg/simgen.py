"""Synthetic scenario generation and design diagnostics.

Both scenarios share one engineered feature: the first predictor is a
linear blend of seven relevant-or-nearby predictors plus a small private
noise term, which makes it strongly correlated with the true model while
staying irrelevant.  The remaining predictors are standard normal with
either an identity covariance (scenario 1) or an AR(1)-Toeplitz covariance
0.5^|j-j'| (scenario 2).  The true support is {2, 3, 4, p} (1-indexed),
extended contiguously from position 5 when more nonzeros are requested,
with values drawn uniformly from [coef_low, coef_high].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .data import Dataset, TruthInfo

__all__ = [
    "ScenarioConfig",
    "gen_scenario",
    "population_covariance",
    "irrepresentable_norm",
    "support_indices",
    "scenario_rng",
]

AR1_RHO = 0.5

# Blend defining the engineered first predictor, indexed by 1-based
# variable number: x1 = 7/8 x_p + 3/8 x_2 + 1/8 (x_3+...+x_7) + 1/8 e.
_BLEND_NEAR = (3 / 8, 1 / 8, 1 / 8, 1 / 8, 1 / 8, 1 / 8)  # x_2 .. x_7
_BLEND_LAST = 7 / 8  # x_p
_BLEND_NOISE = 1 / 8  # private unit-variance noise


@dataclass(frozen=True)
class ScenarioConfig:
    """Dimensions, sparsity, and noise level of one synthetic scenario."""

    n: int
    p: int
    scenario: int = 1
    q: int = 4
    sigma: float = 1.0
    coef_low: float = 0.5
    coef_high: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if self.scenario not in (1, 2):
            raise ValueError("scenario must be 1 or 2")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.p < 8:
            raise ValueError("p must be at least 8 (the engineered predictor references x2..x7 and xp)")
        if not 4 <= self.q <= self.p - 1:
            raise ValueError("q must satisfy 4 <= q <= p - 1")
        if not (0 < self.coef_low <= self.coef_high):
            raise ValueError("coefficient range must satisfy 0 < coef_low <= coef_high")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")


def scenario_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for replication ``stream`` of a seeded run."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream,))))


def support_indices(config: ScenarioConfig) -> np.ndarray:
    """Zero-based true support: {2, 3, 4, p} plus {5..q} when q > 4 (1-indexed)."""
    base = [1, 2, 3, config.p - 1]
    extra = list(range(4, config.q))  # 1-indexed 5..q
    return np.array(sorted(set(base + extra)), dtype=np.intp)


def gen_scenario(config: ScenarioConfig, stream: int = 0) -> Dataset:
    """Draw one dataset from the configured scenario.

    Deterministic given (config.seed, stream); parallel replications should
    use distinct streams.  Draw order is fixed: predictor block, private
    noise of the engineered predictor, coefficient values, response noise.
    """
    rng = scenario_rng(config.seed, stream)
    n, p = config.n, config.p
    rest = rng.standard_normal((n, p - 1))
    if config.scenario == 2:
        # AR(1) recursion applies the exact lower-bidiagonal Cholesky factor
        # of the Toeplitz covariance in O(np).
        scale = np.sqrt(1.0 - AR1_RHO**2)
        for j in range(1, p - 1):
            rest[:, j] = AR1_RHO * rest[:, j - 1] + scale * rest[:, j]
    e = rng.standard_normal(n)
    support = support_indices(config)
    coef_values = rng.uniform(config.coef_low, config.coef_high, size=support.size)
    eps = config.sigma * rng.standard_normal(n)

    x = np.empty((n, p))
    x[:, 1:] = rest
    x[:, 0] = (
        _BLEND_LAST * x[:, p - 1]
        + _BLEND_NEAR[0] * x[:, 1]
        + sum(_BLEND_NEAR[k] * x[:, k + 1] for k in range(1, 6))
        + _BLEND_NOISE * e
    )
    beta = np.zeros(p)
    beta[support] = coef_values
    y = x @ beta + eps
    return Dataset(x=x, y=y, truth=TruthInfo(beta=beta, support=support, sigma=config.sigma))


def population_covariance(config: ScenarioConfig) -> np.ndarray:
    """Exact population covariance of (x1, ..., xp) implied by the generator.

    Dense p x p output; intended for diagnostics at moderate p.
    """
    p = config.p
    if config.scenario == 1:
        sigma_rest = np.eye(p - 1)
    else:
        sigma_rest = toeplitz(AR1_RHO ** np.arange(p - 1))
    # blend weights over the rest block (rest index i <-> variable i+2, 1-indexed)
    a = np.zeros(p - 1)
    a[0:6] = _BLEND_NEAR
    a[p - 2] = _BLEND_LAST
    cross = sigma_rest @ a
    cov = np.empty((p, p))
    cov[1:, 1:] = sigma_rest
    cov[0, 1:] = cross
    cov[1:, 0] = cross
    cov[0, 0] = a @ cross + _BLEND_NOISE**2
    return cov


def irrepresentable_norm(cov: np.ndarray, support, signs) -> float:
    """l-infinity norm of C[S^c, S] @ C[S, S]^{-1} @ signs.

    A value above 1 certifies that the irrepresentable condition fails for
    that sign pattern.  Raises ``numpy.linalg.LinAlgError`` when the
    support block is singular.
    """
    cov = np.asarray(cov, dtype=float)
    support = np.asarray(support, dtype=np.intp)
    signs = np.asarray(signs, dtype=float)
    if signs.shape != (support.size,):
        raise ValueError("signs must align with the support")
    mask = np.zeros(cov.shape[0], dtype=bool)
    mask[support] = True
    css = cov[np.ix_(support, support)]
    csc = cov[np.ix_(np.flatnonzero(~mask), support)]
    u = np.linalg.solve(css, signs)
    return float(np.max(np.abs(csc @ u))) if csc.size else 0.0

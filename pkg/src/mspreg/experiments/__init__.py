"""Experiment drivers: grids, paths, cross-validation, benchmarks, tracking."""

from .bench import (
    MSP_LAMBDA_FRACTION,
    BenchmarkResult,
    lambda_robustness,
    run_benchmark,
    select_lambda_for_sparsity,
)
from .grids import (
    METHODS,
    CVResult,
    FitOutcome,
    PathResult,
    classify_variables,
    cross_validate,
    fit_method,
    lambda_grid,
    trace_path,
)
from .tracking import (
    TrackingWindow,
    load_prices_csv,
    simple_returns,
    synthetic_prices,
    track_index,
    tracking_error,
)

__all__ = [
    "METHODS",
    "MSP_LAMBDA_FRACTION",
    "BenchmarkResult",
    "CVResult",
    "FitOutcome",
    "PathResult",
    "TrackingWindow",
    "classify_variables",
    "cross_validate",
    "fit_method",
    "lambda_grid",
    "lambda_robustness",
    "load_prices_csv",
    "run_benchmark",
    "select_lambda_for_sparsity",
    "simple_returns",
    "synthetic_prices",
    "trace_path",
    "track_index",
    "tracking_error",
]

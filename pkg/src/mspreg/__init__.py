"""Multi-screen-penalty sparse regression toolkit.

Core pieces: a weighted-lasso coordinate-descent kernel (compiled, with a
pure-NumPy fallback), the multi-screen multi-step estimator plus classic
comparison estimators, synthetic scenario generators with engineered
correlation structure, selection/estimation metrics, and experiment
drivers including an index-tracking pipeline (see ``mspreg.experiments``).
"""

__version__ = "0.1.0"

from .data import (
    Dataset,
    SparseCoefficients,
    StandardizedDesign,
    TruthInfo,
    destandardize,
    load_dataset_csv,
    save_dataset_csv,
    standardize,
)
from .estimators import (
    FitTrace,
    Mcp,
    PenaltyKind,
    Scad,
    default_lambdas,
    estimate_noise_sd,
    fit_adaptive_lasso,
    fit_capped_l1,
    fit_lasso,
    fit_lla,
    fit_msp,
    fit_ols_post_lasso,
    msp_default_lambda,
    penalty_derivative,
)
from .metrics import EvalReport, evaluate, summarize
from .simgen import (
    ScenarioConfig,
    gen_scenario,
    irrepresentable_norm,
    population_covariance,
)
from .solver import (
    PenaltySpec,
    SolveReport,
    SolverOptions,
    fit_weighted_lasso,
    kernel_name,
    kkt_check,
    lambda_max,
    soft_threshold,
)

__all__ = [
    "__version__",
    "Dataset",
    "TruthInfo",
    "StandardizedDesign",
    "SparseCoefficients",
    "standardize",
    "destandardize",
    "load_dataset_csv",
    "save_dataset_csv",
    "PenaltySpec",
    "SolverOptions",
    "SolveReport",
    "soft_threshold",
    "lambda_max",
    "fit_weighted_lasso",
    "kkt_check",
    "kernel_name",
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
    "ScenarioConfig",
    "gen_scenario",
    "population_covariance",
    "irrepresentable_norm",
    "EvalReport",
    "evaluate",
    "summarize",
]

"""Distributionally robust local conditional estimation."""

from ._core import (
    Dataset,
    GroundMetric,
    InfeasibleRadiusError,
    InputError,
    LocalScene,
    LossSpec,
    RobustSolution,
    WorstCaseEval,
    adaptive_gamma,
    build_scene,
    estimate,
    generate_synthetic,
    kappa,
    kernel_regress,
    knn_mean,
    load_csv,
    radius_rule,
    robust_knn,
    type_p_deviation,
    worst_case_loss,
    write_csv,
)

__all__ = [
    "Dataset",
    "GroundMetric",
    "InfeasibleRadiusError",
    "InputError",
    "LocalScene",
    "LossSpec",
    "RobustSolution",
    "WorstCaseEval",
    "adaptive_gamma",
    "build_scene",
    "estimate",
    "generate_synthetic",
    "kappa",
    "kernel_regress",
    "knn_mean",
    "load_csv",
    "radius_rule",
    "robust_knn",
    "type_p_deviation",
    "worst_case_loss",
    "write_csv",
]

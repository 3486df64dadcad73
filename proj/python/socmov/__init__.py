"""Movement-model simulation and inference for censored, multiply-labeled trajectories."""

from ._core import (
    Dataset,
    Trajectories,
    build_precision,
    build_propagator,
    censor,
    effective_sample_size,
    estimate_lambdas,
    fit,
    glm_value,
    simulate,
    split_rhat,
    t_critical_value,
    transition_log_density,
)

__all__ = [
    "Dataset",
    "Trajectories",
    "build_precision",
    "build_propagator",
    "censor",
    "effective_sample_size",
    "estimate_lambdas",
    "fit",
    "glm_value",
    "simulate",
    "split_rhat",
    "t_critical_value",
    "transition_log_density",
]

"""Fairness projection of classifier scores onto the Wasserstein barycenter."""

from ._fairport import (
    FairCalibrator,
    InputError,
    InvariantError,
    auc,
    cdf,
    check_prop1,
    compute_db,
    decompose_bias,
    generate,
    hard_accuracy,
    jitter,
    ks_two_sample,
    label_tasks,
    quantile,
    run_cli,
    run_experiment,
    squared_risk,
    transport_counterfactual,
    unfairness,
    w2_distance,
)

__all__ = [
    "FairCalibrator",
    "InputError",
    "InvariantError",
    "auc",
    "cdf",
    "check_prop1",
    "compute_db",
    "decompose_bias",
    "generate",
    "hard_accuracy",
    "jitter",
    "ks_two_sample",
    "label_tasks",
    "quantile",
    "run_cli",
    "run_experiment",
    "squared_risk",
    "transport_counterfactual",
    "unfairness",
    "w2_distance",
]

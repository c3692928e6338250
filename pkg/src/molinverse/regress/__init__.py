"""Penalized linear regression with k-fold CV and penalty sweeps."""

from .linear import (
    CD_TOL,
    ELASTICNET,
    KINDS,
    LASSO,
    PENALTY_GRID,
    RIDGE,
    RegressionModel,
    SweepEntry,
    cross_validate,
    fit_best,
    kfold_indices,
    r2_score,
    project_model,
    select_features,
    sweep,
    train,
)
from .serialize import model_from_text, model_to_text

__all__ = [
    "CD_TOL",
    "ELASTICNET",
    "KINDS",
    "LASSO",
    "PENALTY_GRID",
    "RIDGE",
    "RegressionModel",
    "SweepEntry",
    "cross_validate",
    "fit_best",
    "kfold_indices",
    "model_from_text",
    "model_to_text",
    "project_model",
    "r2_score",
    "select_features",
    "sweep",
    "train",
]

"""Penalized linear regression on standardized count features.

Ridge is solved in closed form via the normal equations; Lasso and
ElasticNet by cyclic coordinate descent on the standardized problem.  The
least-squares term uses the 1/(2n) convention, so the subgradient
conditions are |X'(y - yhat)/n| <= l1 on inactive coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..features import FeatureSchema, FeatureVector

LASSO = "lasso"
RIDGE = "ridge"
ELASTICNET = "elasticnet"
KINDS = (LASSO, RIDGE, ELASTICNET)

CD_TOL = 1e-6
CD_MAX_SWEEPS = 10_000


@dataclass(frozen=True)
class RegressionModel:
    kind: str
    schema: FeatureSchema
    weights: np.ndarray  # per descriptor, on standardized features
    intercept: float
    means: np.ndarray
    stds: np.ndarray  # 1.0 where the raw feature had zero variance
    l1: float
    l2: float
    property_name: str = ""
    r2: float = float("nan")
    rmse: float = float("nan")
    training_fingerprint: str = ""

    @property
    def sigma(self) -> float:
        """Cross-validated RMSE, reused as the default search band."""
        return self.rmse

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        Z = (np.asarray(X, dtype=float) - self.means) / self.stds
        return Z @ self.weights + self.intercept

    def predict(self, x: FeatureVector) -> float:
        if len(x.schema) != len(self.schema) or x.schema.descriptors != self.schema.descriptors:
            raise ValueError("feature vector schema does not match the model")
        return float(self.predict_matrix(np.array([x.values], dtype=float))[0])


def _standardize(X: np.ndarray):
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    constant = stds == 0.0
    safe = np.where(constant, 1.0, stds)
    return (X - means) / safe, means, safe, constant


def _coordinate_descent(Z, y_centered, l1, l2, constant):
    n, p = Z.shape
    w = np.zeros(p)
    col_scale = (Z * Z).sum(axis=0) / n  # 1.0 for standardized columns
    residual = y_centered.copy()
    for _ in range(CD_MAX_SWEEPS):
        max_delta = 0.0
        for j in range(p):
            if constant[j]:
                continue
            zj = Z[:, j]
            rho = (zj @ residual) / n + col_scale[j] * w[j]
            new_w = np.sign(rho) * max(abs(rho) - l1, 0.0) / (col_scale[j] + l2)
            delta = new_w - w[j]
            if delta != 0.0:
                residual -= delta * zj
                w[j] = new_w
                max_delta = max(max_delta, abs(delta))
        if max_delta < CD_TOL:
            break
    return w


def _ridge_closed_form(Z, y_centered, l2, constant):
    n, p = Z.shape
    active = ~constant
    Za = Z[:, active]
    gram = Za.T @ Za / n + l2 * np.eye(active.sum())
    rhs = Za.T @ y_centered / n
    w = np.zeros(p)
    w[active] = np.linalg.solve(gram, rhs)
    return w


def train(
    X,
    y,
    kind: str,
    l1: float = 0.0,
    l2: float = 0.0,
    schema: FeatureSchema | None = None,
    property_name: str = "",
) -> RegressionModel:
    """Fit one penalized linear model.

    ``X`` may be a list of FeatureVectors or an array; Lasso forces l2=0
    and Ridge forces l1=0 per the model definitions.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown model kind {kind!r}; expected one of {KINDS}")
    if schema is None and isinstance(X, (list, tuple)) and X \
            and isinstance(X[0], FeatureVector):
        schema = X[0].schema
    X = _as_matrix(X)
    y = np.asarray(y, dtype=float)
    if X.shape[0] != y.shape[0]:
        raise ValueError("X and y disagree on sample count")
    if X.shape[0] < 3:
        raise ValueError("need at least 3 samples to fit")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise ValueError("non-finite values in training data")
    if kind == LASSO:
        l2 = 0.0
    elif kind == RIDGE:
        l1 = 0.0

    Z, means, stds, constant = _standardize(X)
    intercept = float(y.mean())
    y_centered = y - intercept
    if kind == RIDGE:
        w = _ridge_closed_form(Z, y_centered, l2, constant)
    else:
        w = _coordinate_descent(Z, y_centered, l1, l2, constant)
    return RegressionModel(
        kind=kind,
        schema=schema,
        weights=w,
        intercept=intercept,
        means=means,
        stds=stds,
        l1=l1,
        l2=l2,
        property_name=property_name,
    )


def _as_matrix(X) -> np.ndarray:
    if isinstance(X, np.ndarray):
        return X.astype(float)
    if isinstance(X, (list, tuple)) and X and isinstance(X[0], FeatureVector):
        return np.array([v.values for v in X], dtype=float)
    return np.asarray(X, dtype=float)


def r2_score(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    ss_res = float(((y_true - y_pred) ** 2).sum())
    ss_tot = float(((y_true - y_true.mean()) ** 2).sum())
    if ss_tot == 0.0:
        return 1.0 if ss_res == 0.0 else 0.0
    return 1.0 - ss_res / ss_tot


def kfold_indices(n: int, k: int, seed: int):
    """Deterministic shuffled k-fold split."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    return [order[i::k] for i in range(k)]


def cross_validate(X, y, kind, l1=0.0, l2=0.0, k=10, seed=0):
    """Mean test R2 and RMSE over a seeded shuffled k-fold split."""
    X = _as_matrix(X)
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    if k < 2:
        raise ValueError("folds must be >= 2")
    if k > n:
        raise ValueError(f"fold count {k} exceeds sample count {n}")
    r2s, rmses = [], []
    for test_idx in kfold_indices(n, k, seed):
        mask = np.ones(n, dtype=bool)
        mask[test_idx] = False
        model = train(X[mask], y[mask], kind, l1, l2)
        pred = model.predict_matrix(X[test_idx])
        r2s.append(r2_score(y[test_idx], pred))
        rmses.append(float(np.sqrt(((y[test_idx] - pred) ** 2).mean())))
    return float(np.mean(r2s)), float(np.mean(rmses))


PENALTY_GRID = tuple(10.0 ** e for e in range(-4, 3))  # 1e-4 .. 1e2


@dataclass(frozen=True)
class SweepEntry:
    kind: str
    l1: float
    l2: float
    r2: float
    rmse: float


def sweep(X, y, kinds=KINDS, k=10, seed=0, grid=PENALTY_GRID):
    """Evaluate the penalty grid per model kind and pick the best entry.

    Best = max mean CV R2; ties break to smaller RMSE, then larger total
    penalty, then kind order lasso < ridge < elasticnet.
    """
    entries: list[SweepEntry] = []
    for kind in kinds:
        if kind == LASSO:
            combos = [(l1, 0.0) for l1 in grid]
        elif kind == RIDGE:
            combos = [(0.0, l2) for l2 in grid]
        else:
            combos = [(l1, l2) for l1 in grid for l2 in grid]
        for l1, l2 in combos:
            r2, rmse = cross_validate(X, y, kind, l1, l2, k=k, seed=seed)
            entries.append(SweepEntry(kind, l1, l2, r2, rmse))
    kind_rank = {LASSO: 0, RIDGE: 1, ELASTICNET: 2}
    best = min(
        entries,
        key=lambda e: (-e.r2, e.rmse, -(e.l1 + e.l2), kind_rank[e.kind]),
    )
    return entries, best


def fit_best(X, y, kinds=KINDS, k=10, seed=0, grid=PENALTY_GRID,
             schema=None, property_name="", fingerprint=""):
    """Sweep, then refit the winning configuration on all data.

    The returned model carries the winning entry's CV metrics; its CV RMSE
    doubles as the search band sigma.
    """
    entries, best = sweep(X, y, kinds=kinds, k=k, seed=seed, grid=grid)
    model = train(X, y, best.kind, best.l1, best.l2,
                  schema=schema, property_name=property_name)
    model = RegressionModel(
        **{**model.__dict__, "r2": best.r2, "rmse": best.rmse,
           "training_fingerprint": fingerprint}
    )
    return model, entries, best


def select_features(model: RegressionModel, threshold: float = 1e-8) -> FeatureSchema:
    """Sub-schema of descriptors the model actually uses.

    Element-count descriptors are always retained; the generator needs
    them to fix the atom budget.
    """
    from ..features import ELEMENT

    keep = set()
    for d, w in zip(model.schema.descriptors, model.weights):
        if d.kind == ELEMENT or abs(w) > threshold:
            keep.add((d.kind, d.key))
    return model.schema.filtered(keep)


def project_model(model: RegressionModel, schema: FeatureSchema,
                  threshold: float = 1e-8) -> RegressionModel:
    """The same model restricted to a sub-schema, prediction-identical.

    Exact because a standardized linear model ignores features with zero
    weight; raises if the sub-schema would drop a used feature.
    """
    positions = {(d.kind, d.key): k for k, d in enumerate(model.schema.descriptors)}
    cols = []
    for d in schema.descriptors:
        if (d.kind, d.key) not in positions:
            raise ValueError(f"descriptor {d.key!r} is not in the model schema")
        cols.append(positions[(d.kind, d.key)])
    kept = set(cols)
    for k, w in enumerate(model.weights):
        if k not in kept and abs(w) > threshold:
            raise ValueError(
                f"cannot drop descriptor {model.schema.descriptors[k].key!r} "
                f"with weight {w:g}"
            )
    cols = np.array(cols, dtype=int)
    return RegressionModel(
        kind=model.kind,
        schema=schema,
        weights=model.weights[cols],
        intercept=model.intercept,
        means=model.means[cols],
        stds=model.stds[cols],
        l1=model.l1,
        l2=model.l2,
        property_name=model.property_name,
        r2=model.r2,
        rmse=model.rmse,
        training_fingerprint=model.training_fingerprint,
    )

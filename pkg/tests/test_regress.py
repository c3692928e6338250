import numpy as np
import pytest

from molinverse.chem import parse_smiles
from molinverse.features import ELEMENT, extract_vocabulary, encode
from molinverse.regress import (
    ELASTICNET,
    LASSO,
    RIDGE,
    cross_validate,
    fit_best,
    kfold_indices,
    model_from_text,
    model_to_text,
    r2_score,
    select_features,
    sweep,
    train,
)


def kkt_violation(model, X, y):
    """Max violation of the coordinate-wise subgradient conditions."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    Z = (X - model.means) / model.stds
    n = X.shape[0]
    resid = y - (Z @ model.weights + model.intercept)
    grad = Z.T @ resid / n - model.l2 * model.weights
    worst = 0.0
    for j, w in enumerate(model.weights):
        if model.stds[j] == 1.0 and np.all(X[:, j] == X[0, j]):
            continue  # constant feature, excluded from the fit
        if w == 0.0:
            worst = max(worst, abs(grad[j]) - model.l1)
        else:
            worst = max(worst, abs(grad[j] - model.l1 * np.sign(w)))
    return worst


def random_problem(rng, n=30, p=6, noise=0.1):
    X = rng.normal(size=(n, p)) * rng.uniform(0.5, 3.0, size=p)
    w = rng.normal(size=p) * (rng.random(p) > 0.3)
    y = X @ w + noise * rng.normal(size=n)
    return X, y


class TestTrain:
    def test_exact_affine_recovery(self):
        X = np.arange(12, dtype=float).reshape(6, 2)
        X[:, 1] = [3, 1, 4, 1, 5, 9]
        y = 2.0 * X[:, 0] - 1.0
        model = train(X, y, RIDGE, l2=1e-12)
        pred = model.predict_matrix(X)
        assert np.allclose(pred, y, atol=1e-6)
        assert r2_score(y, pred) == pytest.approx(1.0)

    def test_constant_target(self):
        X = np.random.default_rng(0).normal(size=(8, 3))
        for kind in (LASSO, RIDGE, ELASTICNET):
            model = train(X, np.full(8, 4.2), kind, l1=0.5, l2=0.5)
            assert model.intercept == pytest.approx(4.2)
            assert np.allclose(model.weights, 0.0, atol=1e-9)

    def test_lasso_kkt_small_case(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(5, 2))
        y = rng.normal(size=5)
        model = train(X, y, LASSO, l1=0.1)
        assert kkt_violation(model, X, y) < 1e-5

    def test_kkt_many_random_instances(self):
        rng = np.random.default_rng(42)
        for i in range(20):
            X, y = random_problem(rng)
            l1 = float(rng.uniform(0.01, 0.5))
            l2 = float(rng.uniform(0.0, 0.5))
            model = train(X, y, ELASTICNET, l1=l1, l2=l2)
            assert kkt_violation(model, X, y) < 1e-5

    def test_elasticnet_l1_zero_matches_ridge(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            X, y = random_problem(rng)
            l2 = float(rng.uniform(0.01, 1.0))
            en = train(X, y, ELASTICNET, l1=0.0, l2=l2)
            ridge = train(X, y, RIDGE, l2=l2)
            assert np.allclose(en.weights, ridge.weights, atol=1e-5)

    def test_zero_variance_feature(self):
        X = np.random.default_rng(2).normal(size=(10, 3))
        X[:, 1] = 7.0
        y = X[:, 0] * 2
        model = train(X, y, LASSO, l1=1e-4)
        assert model.weights[1] == 0.0

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            train(np.zeros((2, 2)), np.zeros(2), LASSO)

    def test_non_finite_rejected(self):
        X = np.zeros((4, 2))
        X[0, 0] = np.nan
        with pytest.raises(ValueError):
            train(X, np.zeros(4), RIDGE)

    def test_reorder_invariance(self):
        rng = np.random.default_rng(3)
        X, y = random_problem(rng)
        perm = rng.permutation(X.shape[1])
        a = train(X, y, RIDGE, l2=0.1)
        b = train(X[:, perm], y, RIDGE, l2=0.1)
        assert np.allclose(a.predict_matrix(X), b.predict_matrix(X[:, perm]), atol=1e-9)


class TestPredict:
    def test_training_mean_maps_to_intercept(self):
        rng = np.random.default_rng(5)
        X, y = random_problem(rng)
        model = train(X, y, RIDGE, l2=0.1)
        pred = model.predict_matrix(X.mean(axis=0, keepdims=True))
        assert pred[0] == pytest.approx(model.intercept)

    def test_hand_computed_two_features(self):
        X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        y = np.array([0.0, 1.0, 2.0, 3.0])
        model = train(X, y, RIDGE, l2=1e-10)
        # y = x0 + 2*x1 exactly; standardized weights are w*std
        x = np.array([[1.0, 0.5]])
        expected = 1.0 * 1.0 + 2.0 * 0.5
        assert model.predict_matrix(x)[0] == pytest.approx(expected, abs=1e-6)

    def test_schema_mismatch_raises(self):
        mols = [parse_smiles(s) for s in ["CCO", "CCC", "CCN", "CO"]]
        schema = extract_vocabulary(mols, {1})
        other = extract_vocabulary(mols[:2], {1})
        X = [encode(m, schema) for m in mols]
        model = train(X, [1.0, 2.0, 3.0, 4.0], RIDGE, l2=0.1)
        with pytest.raises(ValueError):
            model.predict(encode(mols[0], other))


class TestCrossValidate:
    def test_perfect_linear(self):
        rng = np.random.default_rng(11)
        X = rng.normal(size=(40, 3))
        y = X @ np.array([1.0, -2.0, 0.5]) + 3
        r2, rmse = cross_validate(X, y, RIDGE, l2=1e-10, k=10, seed=1)
        assert r2 == pytest.approx(1.0, abs=1e-9)
        assert rmse == pytest.approx(0.0, abs=1e-6)

    def test_pure_noise_heavy_penalty(self):
        rng = np.random.default_rng(13)
        X = rng.normal(size=(50, 4))
        y = rng.normal(size=50)
        r2, _ = cross_validate(X, y, RIDGE, l2=1e6, k=5, seed=2)
        assert r2 <= 0.05

    def test_determinism(self):
        rng = np.random.default_rng(17)
        X, y = random_problem(rng)
        a = cross_validate(X, y, LASSO, l1=0.1, k=5, seed=9)
        b = cross_validate(X, y, LASSO, l1=0.1, k=5, seed=9)
        assert a == b

    def test_fold_count_validation(self):
        X = np.zeros((4, 2))
        with pytest.raises(ValueError):
            cross_validate(X, np.zeros(4), RIDGE, k=5)
        with pytest.raises(ValueError):
            cross_validate(X, np.zeros(4), RIDGE, k=1)

    def test_folds_partition(self):
        folds = kfold_indices(23, 5, seed=3)
        all_idx = sorted(int(i) for f in folds for i in f)
        assert all_idx == list(range(23))


class TestSweep:
    def test_single_entry(self):
        rng = np.random.default_rng(19)
        X, y = random_problem(rng)
        entries, best = sweep(X, y, kinds=(LASSO,), k=5, seed=1, grid=(0.1,))
        assert len(entries) == 1
        assert best == entries[0]

    def test_grid_shape(self):
        rng = np.random.default_rng(23)
        X, y = random_problem(rng, n=20)
        entries, _ = sweep(X, y, k=4, seed=1)
        by_kind = {}
        for e in entries:
            by_kind.setdefault(e.kind, 0)
            by_kind[e.kind] += 1
        assert by_kind[LASSO] == 7
        assert by_kind[RIDGE] == 7
        assert by_kind[ELASTICNET] == 49

    def test_duplicate_grid_points_identical(self):
        rng = np.random.default_rng(29)
        X, y = random_problem(rng)
        e1, _ = sweep(X, y, kinds=(RIDGE,), k=5, seed=4, grid=(0.1, 0.1))
        assert e1[0].r2 == e1[1].r2 and e1[0].rmse == e1[1].rmse


class TestSelectFeatures:
    def _fit(self, l1):
        mols = [parse_smiles(s) for s in
                ["CCO", "CCC", "CCN", "CO", "CCCO", "CNC", "C=O", "CC=O"]]
        schema = extract_vocabulary(mols, {1, 2})
        X = [encode(m, schema) for m in mols]
        rng = np.random.default_rng(0)
        y = rng.normal(size=len(mols))
        return train(X, y, LASSO, l1=l1), schema

    def test_heavy_penalty_keeps_only_elements(self):
        model, schema = self._fit(l1=100.0)
        selected = select_features(model)
        assert all(d.kind == ELEMENT for d in selected.descriptors)

    def test_light_penalty_keeps_everything_nonzero(self):
        model, schema = self._fit(l1=1e-6)
        selected = select_features(model)
        nonzero = sum(1 for w in model.weights if abs(w) > 1e-8)
        assert len(selected) >= nonzero


class TestSerialization:
    def test_roundtrip(self):
        mols = [parse_smiles(s) for s in ["CCO", "CCC", "CCN", "CO", "C=O"]]
        schema = extract_vocabulary(mols, {1, 2})
        X = [encode(m, schema) for m in mols]
        y = [1.0, 2.0, 1.5, 0.5, 0.1]
        model, _, _ = fit_best(X, y, kinds=(LASSO,), k=3, seed=0,
                               grid=(0.01,), schema=schema,
                               property_name="bp", fingerprint="5:abc")
        again = model_from_text(model_to_text(model))
        assert again.kind == model.kind
        assert again.schema == model.schema
        assert np.array_equal(again.weights, model.weights)
        assert again.intercept == model.intercept
        assert again.training_fingerprint == "5:abc"
        x = encode(mols[0], schema)
        assert again.predict(x) == model.predict(x)

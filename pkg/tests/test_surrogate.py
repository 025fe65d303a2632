import numpy as np
import pytest

from src.datagen.builtin_specs import builtin_spec
from src.datagen.generator import generate
from src.exceptions import ContractError, SingularDesignError
from src.surrogate.ensembles import TreeEnsemble, derived_seeds, fit_boosting, fit_forest
from src.surrogate.linear import fit_linear
from src.surrogate.targets import FRAMEWORK_INTERACTIONS, adoption_level, build_targets, map_to_strategies
from src.surrogate.trees import TreeNode, fit_tree, predict_tree
from src.surrogate.validation import (
    ModelSpec,
    cross_validate,
    default_model_specs,
    fold_indices,
    holdout_split,
    regression_metrics,
)


@pytest.fixture(scope="module")
def targets():
    return build_targets(generate(builtin_spec("sustainability", 42)), seed=42)


def synthetic(n: int = 200, seed: int = 0):
    rng = np.random.default_rng(seed)
    X = rng.random((n, 2))
    return X, X[:, 0].copy()


def test_tree_finds_midpoint_split():
    tree = fit_tree([[0.0], [1.0], [2.0], [3.0]], [0.0, 0.0, 10.0, 10.0], max_depth=1, min_samples_leaf=1)
    assert tree.feature == 0
    assert tree.threshold == 1.5
    assert (tree.left.value, tree.right.value) == (0.0, 10.0)


@pytest.mark.parametrize("seed", range(6))
def test_tree_stump_matches_exhaustive_thresholds(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 9))
    x = rng.integers(0, 6, size=n).astype(float)
    y = rng.normal(size=n)
    if np.unique(x).size < 2:
        x[0], x[1] = 0.0, 5.0
    values = np.unique(x)
    best_sse, best_threshold = np.inf, None
    for threshold in (values[:-1] + values[1:]) / 2.0:
        left, right = y[x <= threshold], y[x > threshold]
        sse = ((left - left.mean()) ** 2).sum() + ((right - right.mean()) ** 2).sum()
        if sse < best_sse - 1e-12:
            best_sse, best_threshold = sse, threshold
    tree = fit_tree(x[:, None], y, max_depth=1, min_samples_leaf=1)
    assert tree.threshold == pytest.approx(best_threshold)
    assert tree.left.value == pytest.approx(y[x <= best_threshold].mean())


def test_tree_degenerate_cases():
    constant = fit_tree([[0.0], [1.0], [2.0]], [4.0, 4.0, 4.0])
    assert constant.is_leaf and constant.value == 4.0
    stump = fit_tree([[0.0], [1.0], [2.0], [3.0]], [0.0, 0.0, 10.0, 10.0], max_depth=0)
    assert stump.is_leaf and stump.value == 5.0


def test_tree_serialization_preserves_predictions():
    X, y = synthetic(60)
    tree = fit_tree(X, y, max_depth=4)
    again = TreeNode.from_dict(tree.to_dict())
    np.testing.assert_array_equal(predict_tree(again, X), predict_tree(tree, X))


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_forest_importance_favours_signal(seed):
    # one candidate feature per split on two columns, so deep nodes still split on noise;
    # observed signal share is 0.88 to 0.91 across these seeds
    X, y = synthetic(seed=seed)
    forest = fit_forest(X, y, seed=seed)
    assert forest.feature_importance[0] > 0.85
    assert forest.feature_importance[0] > 5 * forest.feature_importance[1]
    assert sum(forest.feature_importance) == pytest.approx(1.0)


def test_forest_is_deterministic_and_thread_independent():
    X, y = synthetic(80)
    a = fit_forest(X, y, n_trees=10, seed=3)
    b = fit_forest(X, y, n_trees=10, seed=3, threads=4)
    np.testing.assert_array_equal(a.predict(X), b.predict(X))


def test_forest_predicts_mean_of_trees():
    X, y = synthetic(120, seed=5)
    forest = fit_forest(X, y, n_trees=15, seed=2)
    np.testing.assert_allclose(forest.predict(X), forest.tree_predictions(X).mean(axis=1), atol=1e-12)


def test_forest_single_row():
    forest = fit_forest([[1.0, 2.0]], [7.0], n_trees=1)
    assert forest.predict([[1.0, 2.0]])[0] == 7.0


def test_boosting_zero_learning_rate_predicts_mean():
    X, y = synthetic(50)
    model = fit_boosting(X, y, n_trees=5, learning_rate=0.0)
    np.testing.assert_allclose(model.predict(X), y.mean())


def test_boosting_training_error_never_increases():
    X, y = synthetic(200, seed=4)
    model = fit_boosting(X, y, n_trees=40)
    staged = model.base_prediction + model.learning_rate * np.cumsum(model.tree_predictions(X), axis=1)
    mse = ((staged - y[:, None]) ** 2).mean(axis=0)
    assert np.all(np.diff(mse) <= 1e-12)


def test_boosting_prediction_decomposes_over_trees():
    X, y = synthetic(100, seed=2)
    model = fit_boosting(X, y, n_trees=10)
    expected = model.base_prediction + model.learning_rate * model.tree_predictions(X).sum(axis=1)
    np.testing.assert_allclose(model.predict(X), expected, atol=1e-12)
    restored = TreeEnsemble.from_dict(model.to_dict())
    np.testing.assert_allclose(restored.predict(X), model.predict(X), atol=1e-12)


def test_boosting_rejects_bad_learning_rate():
    X, y = synthetic(20)
    with pytest.raises(ContractError):
        fit_boosting(X, y, learning_rate=1.5)


def test_derived_seeds_are_stable():
    assert derived_seeds(42, 3) == derived_seeds(42, 3)
    assert len(set(derived_seeds(42, 100))) == 100


def test_linear_exact_fits():
    x = np.arange(5, dtype=float)[:, None]
    model = fit_linear(x, 2 * x[:, 0] + 1)
    assert model.coef[0] == pytest.approx(2.0)
    assert model.intercept == pytest.approx(1.0)
    simple = fit_linear([[1.0], [2.0], [3.0]], [1.0, 2.0, 3.0])
    assert simple.coef[0] == pytest.approx(1.0)
    assert simple.intercept == pytest.approx(0.0, abs=1e-12)


def test_linear_collinear_design():
    x1 = np.arange(10, dtype=float)
    with pytest.raises(SingularDesignError):
        fit_linear(np.column_stack([x1, 2 * x1]), x1 + 1.0)
    with pytest.raises(ContractError):
        fit_linear([[1.0, 2.0], [3.0, 4.0]], [1.0, 2.0])


def test_regression_metrics():
    metrics = regression_metrics([1.0, 2.0, 3.0], [1.0, 2.0, 5.0])
    assert metrics.mse == pytest.approx(4.0 / 3.0)
    assert metrics.mae == pytest.approx(2.0 / 3.0)
    assert metrics.rmse == pytest.approx(np.sqrt(4.0 / 3.0))
    assert metrics.r2 == pytest.approx(1.0 - 4.0 / 2.0)


def test_fold_sizes():
    folds = fold_indices(530, 5, seed=42)
    assert [f.size for f in folds] == [106] * 5
    assert sorted(np.concatenate(folds).tolist()) == list(range(530))
    assert [f.size for f in fold_indices(11, 3, seed=0)] == [4, 4, 3]
    with pytest.raises(ContractError):
        fold_indices(4, 5, seed=0)


def test_cross_validation_of_exact_linear_relation():
    X = np.arange(10, dtype=float)[:, None]
    result = cross_validate(ModelSpec("ols", "linear"), X, 3 * X[:, 0] - 2, k=10, seed=0)
    assert len(result.fold_metrics) == 10
    assert result.mean.mse == pytest.approx(0.0, abs=1e-18)


def test_holdout_split_is_disjoint():
    train, test = holdout_split(530, 0.2, seed=42)
    assert test.size == 106 and train.size == 424
    assert not set(train) & set(test)
    assert np.all(np.diff(train) > 0)


def test_strategy_mapping_respects_bounds(targets):
    assert targets.strategies.shape == (530, 9)
    assert targets.strategies[:, 0].min() >= 1.0
    assert targets.strategies[:, 5].max() <= 1000.0


def test_adoption_saturates_outside_readiness_range():
    levels = adoption_level(np.array([5.0, 25.0, 47.5, 70.0, 95.0]))
    np.testing.assert_allclose(levels, [1.0, 1.0, 5.5, 10.0, 10.0])


def test_mapping_requires_complete_columns(targets):
    frame = generate(builtin_spec("sustainability", 42)).frame
    frame.loc[0, "innovation_index"] = np.nan
    with pytest.raises(ContractError):
        map_to_strategies(frame)


@pytest.mark.parametrize("seed", [1, 4, 5, 6, 8, 10, 42])
def test_model_ordering_on_composite_target(seed):
    data = build_targets(generate(builtin_spec("sustainability", seed)), seed=seed)
    y = data.labels["composite"]
    results = {
        spec.name: cross_validate(spec, data.features, y, k=5, seed=seed, feature_names=data.feature_names)
        for spec in default_model_specs(FRAMEWORK_INTERACTIONS)[:3]
    }
    linear, forest, boosting = (results[n].mean.r2 for n in ("Linear Regression", "Random Forest", "Gradient Boosting"))
    assert linear < forest < boosting
    assert forest - linear > 0.02
    assert boosting >= 0.98


def test_framework_model_engineers_interactions(targets):
    spec = default_model_specs(FRAMEWORK_INTERACTIONS)[-1]
    y = targets.labels["sustainability"]
    model = spec.fit(targets.features, y, feature_names=targets.feature_names, seed=1)
    assert model.engineered_names[-2:] == [f"{a}_x_{b}" for a, b in FRAMEWORK_INTERACTIONS]
    assert len(model.feature_importance) == len(targets.feature_names) + 2
    assert regression_metrics(y, model.predict(targets.features)).r2 > 0.95

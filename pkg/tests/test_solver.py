import numpy as np
import pytest

from src.exceptions import ContractError, OracleInapplicableError
from src.model.domain import BoundsSet, DeploymentStrategy, ModelCoefficients, WeightConfig
from src.optimization.oracles import corner_oracle, grid_oracle
from src.optimization.solver import (
    SolverConfig,
    compare_results,
    maximize,
    maximize_box,
    projected_gradient,
)
from src.optimization.sensitivity import default_weight_configs
from tests.conftest import CORNER


def test_maximize_reaches_corner(default_weights, coefficients, bounds):
    result = maximize(default_weights, coefficients, bounds)
    assert result.converged
    assert result.improved
    assert result.objective_value == pytest.approx(2.946730, abs=1e-4)
    np.testing.assert_allclose(result.optimum.to_array(), CORNER, atol=1e-4 * bounds.span.max())
    assert result.objective_history[-1] == pytest.approx(result.objective_value, abs=1e-9)


def test_balanced_weights_same_corner(coefficients, bounds):
    result = maximize(WeightConfig(0.33, 0.33, 0.34), coefficients, bounds)
    assert result.objective_value == pytest.approx(1.779431, abs=1e-4)
    gap = np.abs(result.optimum.to_array() - np.array(CORNER)) / bounds.span
    assert np.all(gap <= 1e-4)


def test_one_variable_interior_optimum():
    solution = maximize_box(
        fun=lambda x: -float((x[0] - 3.0) ** 2),
        grad=lambda x: np.array([-2.0 * (x[0] - 3.0)]),
        lower=np.array([0.0]),
        upper=np.array([10.0]),
        x0=np.array([8.0]),
        max_iterations=200,
        tolerance=1e-10,
    )
    assert solution.converged
    assert solution.x[0] == pytest.approx(3.0, abs=1e-6)


def test_projected_gradient_blocks_bound_directions():
    u = np.array([0.0, 1.0, 0.5, 0.0])
    g = np.array([1.0, -1.0, 2.0, -3.0])
    np.testing.assert_array_equal(projected_gradient(u, g), [0.0, 0.0, 2.0, -3.0])


def test_solver_agrees_with_corner_oracle_for_presets(coefficients, bounds):
    for label, w in default_weight_configs():
        result = maximize(w, coefficients, bounds)
        oracle = corner_oracle(w, coefficients, bounds)
        assert compare_results(result, oracle, bounds), label


def test_corner_oracle_tie_break_without_environment_weight(coefficients, bounds):
    oracle = corner_oracle(WeightConfig(0.5, 0.5, 0.0), coefficients, bounds)
    np.testing.assert_array_equal(oracle.optimum.to_array(), CORNER)
    result = maximize(WeightConfig(0.5, 0.5, 0.0), coefficients, bounds)
    assert compare_results(result, oracle, bounds)


def test_corner_oracle_follows_reversed_energy_sign(default_weights, bounds):
    flipped = ModelCoefficients(g1=-0.4, strict=False)
    oracle = corner_oracle(default_weights, flipped, bounds)
    assert oracle.optimum.energy_consumption == 2000.0


def test_corner_oracle_rejects_sign_change(bounds):
    # ai_adoption partial changes sign when renewable_energy can go below zero
    shifted = BoundsSet({**bounds.intervals, "renewable_energy": (-50.0, 100.0)})
    with pytest.raises(OracleInapplicableError):
        corner_oracle(WeightConfig(0.6, 0.3, 0.1), ModelCoefficients(), shifted)


def test_grid_with_two_points_is_corner_enumeration(default_weights, coefficients, bounds):
    grid = grid_oracle(default_weights, coefficients, bounds, 2)
    oracle = corner_oracle(default_weights, coefficients, bounds)
    assert compare_results(grid, oracle, bounds)


def test_grid_never_beats_solver(default_weights, coefficients, bounds):
    result = maximize(default_weights, coefficients, bounds)
    grid = grid_oracle(default_weights, coefficients, bounds, 5)
    assert grid.objective_value <= result.objective_value + 1e-9


def test_grid_threads_do_not_change_answer(default_weights, coefficients, bounds):
    single = grid_oracle(default_weights, coefficients, bounds, 3, threads=1, chunk_size=1000)
    pooled = grid_oracle(default_weights, coefficients, bounds, 3, threads=4, chunk_size=1000)
    assert single.optimum == pooled.optimum


def test_grid_point_range(default_weights, coefficients, bounds):
    with pytest.raises(ContractError):
        grid_oracle(default_weights, coefficients, bounds, 7)


def test_initial_strategy_must_be_inside_bounds(default_weights, coefficients, bounds):
    start = DeploymentStrategy.initial().replace(ai_adoption=20)
    with pytest.raises(ContractError):
        maximize(default_weights, coefficients, bounds, SolverConfig(initial_strategy=start))


def test_iteration_cap_reports_non_convergence(default_weights, coefficients, bounds):
    result = maximize(default_weights, coefficients, bounds, SolverConfig(max_iterations=1))
    assert result.iterations <= 1
    assert result.to_dict()["converged"] == result.converged


def test_solver_is_deterministic(default_weights, coefficients, bounds):
    first = maximize(default_weights, coefficients, bounds)
    second = maximize(default_weights, coefficients, bounds)
    assert first.objective_history == second.objective_history
    np.testing.assert_array_equal(first.optimum.to_array(), second.optimum.to_array())


def test_objective_history_never_decreases(coefficients, bounds):
    for w in (WeightConfig(0.6, 0.3, 0.1), WeightConfig(0.33, 0.33, 0.34), WeightConfig(0.1, 0.1, 0.8)):
        history = np.array(maximize(w, coefficients, bounds).objective_history)
        assert history.size >= 2
        assert np.all(np.diff(history) >= 0.0)


def test_unnormalized_weights_keep_the_argmax(default_weights, coefficients, bounds):
    scaled = maximize(WeightConfig(6.0, 3.0, 1.0, strict=False), coefficients, bounds)
    reference = maximize(default_weights, coefficients, bounds)
    np.testing.assert_allclose(scaled.optimum.to_array(), reference.optimum.to_array(), atol=1e-4 * bounds.span.max())
    assert scaled.objective_value == pytest.approx(10.0 * reference.objective_value, rel=1e-6)

import pytest

from src.exceptions import ContractError, DegenerateError
from src.model.domain import VARIABLES, BoundsSet, DeploymentStrategy, ModelCoefficients, WeightConfig
from src.model.objective import composite_objective
from src.optimization.sensitivity import (
    parameter_sensitivity,
    sensitivity_level,
    sweep_weights,
)


def test_sweep_has_identical_optima(coefficients, bounds):
    rows = sweep_weights(None, coefficients, bounds)
    assert [r.label for r in rows][0] == "Sustainability-focused"
    assert len(rows) == 5
    first = rows[0].optimum.to_array()
    for row in rows:
        assert row.agrees
        assert (abs(row.optimum.to_array() - first) <= 1e-4 * bounds.span).all()
    assert rows[0].objective == pytest.approx(2.946730, abs=1e-4)


def test_sweep_threads_preserve_order(coefficients, bounds):
    serial = sweep_weights(None, coefficients, bounds)
    pooled = sweep_weights(None, coefficients, bounds, threads=3)
    assert [r.label for r in pooled] == [r.label for r in serial]
    assert [r.objective for r in pooled] == pytest.approx([r.objective for r in serial])


def test_sensitivity_at_corner(corner, default_weights, coefficients, bounds):
    rows = parameter_sensitivity(corner, default_weights, coefficients, bounds, 0.5)
    by_name = {r.parameter: r for r in rows}
    assert rows[0].parameter == "ai_adoption"
    assert rows[-1].parameter == "water_usage"
    assert by_name["ai_adoption"].coefficient_pct == pytest.approx(42.34, abs=0.01)
    assert by_name["renewable_energy"].coefficient_pct == pytest.approx(35.15, abs=0.01)
    assert by_name["ai_adoption"].level == "High"
    # already at the upper bound, so raising it is clamped away
    assert by_name["ai_adoption"].high_value == 10.0
    assert by_name["ai_adoption"].change_high_pct == 0.0


def test_linear_terms_match_closed_form(corner, default_weights, coefficients, bounds):
    rows = {r.parameter: r for r in parameter_sensitivity(corner, default_weights, coefficients, bounds, 0.5)}
    baseline = composite_objective(corner, default_weights, coefficients)
    c = coefficients
    expected = {
        "innovation_index": default_weights.beta * c.b1 * 50.0 / 100.0,
        "market_stability": default_weights.beta * c.b2 * 5.0 / 10.0,
        "energy_consumption": default_weights.gamma * c.g1 * 25.0 / c.norm_energy,
        "carbon_emissions": default_weights.gamma * c.g2 * 10.0 / c.norm_carbon,
        "water_usage": default_weights.gamma * c.g3 * 50.0 / c.norm_water,
    }
    for name, delta_f in expected.items():
        assert rows[name].coefficient_pct == pytest.approx(100.0 * delta_f / baseline, abs=1e-9)
    assert rows["water_usage"].coefficient_pct == pytest.approx(0.007, abs=5e-4)


def test_smaller_delta_gives_smaller_linear_coefficients(corner, default_weights, coefficients, bounds):
    wide = {r.parameter: r.coefficient_pct for r in parameter_sensitivity(corner, default_weights, coefficients, bounds, 0.5)}
    narrow = {r.parameter: r.coefficient_pct for r in parameter_sensitivity(corner, default_weights, coefficients, bounds, 0.25)}
    for name in ("innovation_index", "market_stability", "energy_consumption", "carbon_emissions", "water_usage"):
        assert narrow[name] < wide[name]


def test_sensitivity_levels():
    assert sensitivity_level(10.0) == "High"
    assert sensitivity_level(9.99) == "Medium"
    assert sensitivity_level(5.0) == "Medium"
    assert sensitivity_level(4.9) == "Low"


def test_sensitivity_rejects_bad_delta(corner, default_weights, coefficients, bounds):
    with pytest.raises(ContractError):
        parameter_sensitivity(corner, default_weights, coefficients, bounds, 1.0)


def test_zero_objective_is_degenerate(bounds):
    # renewable_energy = 0 and efficiency_gain bound lowered to 0 make S vanish;
    # pure-sustainability weights then give F = 0
    widened = BoundsSet({**bounds.intervals, "renewable_energy": (0.0, 100.0), "efficiency_gain": (0.0, 80.0)})
    x = DeploymentStrategy.initial().replace(renewable_energy=0.0, efficiency_gain=0.0)
    with pytest.raises(DegenerateError):
        parameter_sensitivity(x, WeightConfig(1.0, 0.0, 0.0), ModelCoefficients(), widened)


def test_rows_cover_every_variable(corner, default_weights, coefficients, bounds):
    rows = parameter_sensitivity(corner, default_weights, coefficients, bounds)
    assert sorted(r.parameter for r in rows) == sorted(VARIABLES)

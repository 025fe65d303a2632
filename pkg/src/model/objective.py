"""Closed-form objective components and their analytic gradient.

All functions are pure. The ``*_values`` helpers accept stacked strategies of
shape ``(..., 9)`` in ``VARIABLES`` order and are what the oracles, the
sensitivity sweep and the surrogate targets evaluate in bulk.
"""

from typing import Tuple

import numpy as np

from src.exceptions import ContractError, DomainError, SingularityError
from src.model.domain import DeploymentStrategy, ModelCoefficients, WeightConfig

(
    AI_ADOPTION,
    RENEWABLE,
    EFFICIENCY,
    INNOVATION,
    STABILITY,
    INVESTMENT,
    ENERGY,
    CARBON,
    WATER,
) = range(9)


def _as_matrix(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 9:
        raise ContractError(f"Strategy arrays need 9 columns, got shape {x.shape}")
    return x


def _require_finite(x: np.ndarray) -> None:
    if not np.all(np.isfinite(x)):
        raise DomainError("Strategy contains non-finite values")


def sustainability_values(x, c: ModelCoefficients) -> np.ndarray:
    x = _as_matrix(x)
    _require_finite(x)
    if np.any(x[..., RENEWABLE] < 0):
        raise DomainError("renewable_energy must be >= 0")
    log_term = np.log1p(x[..., RENEWABLE] / 100.0) / c.log_scale
    return c.a1 * x[..., AI_ADOPTION] * log_term + c.a2 * (x[..., EFFICIENCY] / 100.0) ** 2


def resilience_values(x, c: ModelCoefficients) -> np.ndarray:
    x = _as_matrix(x)
    _require_finite(x)
    if np.any(x[..., INVESTMENT] < 0):
        raise DomainError("ai_investment must be >= 0")
    return (
        c.b1 * x[..., INNOVATION] / 100.0
        + c.b2 * x[..., STABILITY] / 10.0
        + c.b3 * np.sqrt(x[..., INVESTMENT] / 1000.0)
    )


def environmental_values(x, c: ModelCoefficients) -> np.ndarray:
    x = _as_matrix(x)
    _require_finite(x)
    if np.any(x[..., ENERGY:] < 0):
        raise DomainError("energy, carbon and water consumption must be >= 0")
    return (
        c.g1 * x[..., ENERGY] / c.norm_energy
        + c.g2 * x[..., CARBON] / c.norm_carbon
        + c.g3 * x[..., WATER] / c.norm_water
    )


def objective_values(x, w: WeightConfig, c: ModelCoefficients) -> np.ndarray:
    """Composite objective F for every strategy row in ``x``"""
    if w.strict:
        w.validate()
    return (
        w.alpha * sustainability_values(x, c)
        + w.beta * resilience_values(x, c)
        - w.gamma * environmental_values(x, c)
    )


def gradient_values(x, w: WeightConfig, c: ModelCoefficients) -> np.ndarray:
    """Analytic dF/dx, same shape as ``x``"""
    x = _as_matrix(x)
    _require_finite(x)
    if np.any(x[..., RENEWABLE] <= -100.0):
        raise DomainError("renewable_energy must be > -100")
    if np.any(x[..., INVESTMENT] < 0):
        raise DomainError("ai_investment must be >= 0")
    if np.any(x[..., INVESTMENT] == 0):
        raise SingularityError("sqrt term of resilience is not differentiable at ai_investment = 0")

    grad = np.empty_like(x)
    grad[..., AI_ADOPTION] = w.alpha * c.a1 * np.log1p(x[..., RENEWABLE] / 100.0) / c.log_scale
    grad[..., RENEWABLE] = (
        w.alpha * c.a1 * x[..., AI_ADOPTION] / ((100.0 + x[..., RENEWABLE]) * c.log_scale)
    )
    grad[..., EFFICIENCY] = w.alpha * c.a2 * 2.0 * x[..., EFFICIENCY] / 100.0**2
    grad[..., INNOVATION] = w.beta * c.b1 / 100.0
    grad[..., STABILITY] = w.beta * c.b2 / 10.0
    grad[..., INVESTMENT] = w.beta * c.b3 / (2000.0 * np.sqrt(x[..., INVESTMENT] / 1000.0))
    grad[..., ENERGY] = -w.gamma * c.g1 / c.norm_energy
    grad[..., CARBON] = -w.gamma * c.g2 / c.norm_carbon
    grad[..., WATER] = -w.gamma * c.g3 / c.norm_water
    return grad


def sustainability_impact(s: DeploymentStrategy, c: ModelCoefficients) -> float:
    return float(sustainability_values(s.to_array(), c))


def economic_resilience(s: DeploymentStrategy, c: ModelCoefficients) -> float:
    return float(resilience_values(s.to_array(), c))


def environmental_cost(s: DeploymentStrategy, c: ModelCoefficients) -> float:
    return float(environmental_values(s.to_array(), c))


def component_scores(s: DeploymentStrategy, c: ModelCoefficients) -> Tuple[float, float, float]:
    return (
        sustainability_impact(s, c),
        economic_resilience(s, c),
        environmental_cost(s, c),
    )


def composite_objective(
    s: DeploymentStrategy, w: WeightConfig, c: ModelCoefficients
) -> float:
    return float(objective_values(s.to_array(), w, c))


def objective_gradient(
    s: DeploymentStrategy, w: WeightConfig, c: ModelCoefficients
) -> np.ndarray:
    if w.strict:
        w.validate()
    return gradient_values(s.to_array(), w, c)

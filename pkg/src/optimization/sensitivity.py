import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.config.config import SENSITIVITY_LEVELS, weight_presets
from src.exceptions import ContractError, DegenerateError
from src.model.domain import (
    VARIABLES,
    BoundsSet,
    DeploymentStrategy,
    ModelCoefficients,
    WeightConfig,
)
from src.model.objective import composite_objective, objective_values
from src.optimization.oracles import corner_oracle
from src.optimization.solver import SolverConfig, compare_results, maximize

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WeightSweepRow:
    label: str
    weights: WeightConfig
    objective: float
    optimum: DeploymentStrategy
    oracle_objective: float
    agrees: bool
    converged: bool = True

    def to_record(self) -> Dict:
        record = {"label": self.label, **self.weights.to_dict()}
        record.update(
            {
                "objective": self.objective,
                "oracle_objective": self.oracle_objective,
                "agrees": self.agrees,
                "converged": self.converged,
            }
        )
        record.update(self.optimum.to_dict())
        return record


@dataclass(frozen=True)
class SensitivityRow:
    parameter: str
    coefficient_pct: float
    level: str
    low_value: float
    high_value: float
    change_low_pct: float
    change_high_pct: float

    def to_record(self) -> Dict:
        return {
            "parameter": self.parameter,
            "coefficient_pct": self.coefficient_pct,
            "level": self.level,
            "low_value": self.low_value,
            "high_value": self.high_value,
            "change_low_pct": self.change_low_pct,
            "change_high_pct": self.change_high_pct,
        }


def default_weight_configs() -> List[Tuple[str, WeightConfig]]:
    return [
        (p["label"], WeightConfig(p["alpha"], p["beta"], p["gamma"]))
        for p in weight_presets()
    ]


def sensitivity_level(coefficient_pct: float, levels: Optional[Dict[str, float]] = None) -> str:
    levels = levels or SENSITIVITY_LEVELS
    if coefficient_pct >= levels["High"]:
        return "High"
    if coefficient_pct >= levels["Medium"]:
        return "Medium"
    return "Low"


def sweep_weights(
    configs: Optional[Sequence[Tuple[str, WeightConfig]]],
    c: ModelCoefficients,
    b: BoundsSet,
    cfg: Optional[SolverConfig] = None,
    threads: int = 1,
) -> List[WeightSweepRow]:
    """Solve once per weight configuration and cross-check each optimum against the corner oracle"""
    configs = list(configs) if configs is not None else default_weight_configs()
    cfg = cfg or SolverConfig()

    def solve(item: Tuple[str, WeightConfig]) -> WeightSweepRow:
        label, w = item
        result = maximize(w, c, b, cfg)
        oracle = corner_oracle(w, c, b)
        agrees = compare_results(result, oracle, b)
        if not agrees:
            logger.warning(
                f"Solver and corner oracle disagree for '{label}': "
                f"{result.objective_value:.6f} vs {oracle.objective_value:.6f}"
            )
        return WeightSweepRow(
            label=label,
            weights=w,
            objective=result.objective_value,
            optimum=result.optimum,
            oracle_objective=oracle.objective_value,
            agrees=agrees,
            converged=result.converged,
        )

    logger.info(f"Starting weight sweep over {len(configs)} configurations")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(solve, configs))
    else:
        rows = [solve(item) for item in configs]
    logger.info("Successfully completed weight sweep")
    return rows


def parameter_sensitivity(
    x_star: DeploymentStrategy,
    w: WeightConfig,
    c: ModelCoefficients,
    b: BoundsSet,
    delta_fraction: float = 0.5,
    levels: Optional[Dict[str, float]] = None,
) -> List[SensitivityRow]:
    """One-at-a-time relative objective change for v*(1 -/+ delta), clamped to bounds"""
    if not (0.0 < delta_fraction < 1.0):
        raise ContractError(f"delta_fraction must be in (0, 1), got {delta_fraction}")
    if not b.contains(x_star):
        raise ContractError(f"x_star outside bounds: {b.violations(x_star)}")
    baseline = composite_objective(x_star, w, c)
    if baseline == 0.0:
        raise DegenerateError("Objective is zero at x_star; relative change is undefined")

    x = x_star.to_array()
    n = len(VARIABLES)
    # rows 0..n-1 lower the variable, rows n..2n-1 raise it
    perturbed = np.tile(x, (2 * n, 1))
    idx = np.arange(n)
    perturbed[idx, idx] = np.clip(x * (1.0 - delta_fraction), b.lower, b.upper)
    perturbed[n + idx, idx] = np.clip(x * (1.0 + delta_fraction), b.lower, b.upper)
    change = 100.0 * np.abs(objective_values(perturbed, w, c) - baseline) / abs(baseline)

    rows = []
    for i, name in enumerate(VARIABLES):
        coefficient = float(max(change[i], change[n + i]))
        rows.append(
            SensitivityRow(
                parameter=name,
                coefficient_pct=coefficient,
                level=sensitivity_level(coefficient, levels),
                low_value=float(perturbed[i, i]),
                high_value=float(perturbed[n + i, i]),
                change_low_pct=float(change[i]),
                change_high_pct=float(change[n + i]),
            )
        )
    # stable sort keeps variable order among equal coefficients
    rows.sort(key=lambda r: -r.coefficient_pct)
    return rows

"""Prediction targets for the surrogate experiments.

Each country-year row is read as a deployment strategy, scored with the
closed-form objective components and perturbed with small Gaussian noise.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from src.datagen.data_table import DataTable
from src.exceptions import ContractError
from src.model.domain import ModelCoefficients, WeightConfig
from src.model.objective import (
    environmental_values,
    objective_values,
    resilience_values,
    sustainability_values,
)

logger = logging.getLogger(__name__)

SOURCE_COLUMNS = (
    "ai_readiness_index",
    "renewable_energy_pct",
    "energy_efficiency_index",
    "innovation_index",
    "regulatory_quality",
    "ai_investment_per_capita",
    "ai_energy_mwh",
    "carbon_intensity",
    "ai_water_l",
)

COMPONENTS = ("sustainability", "resilience", "environmental", "composite")

# engineered features fed to the framework model
FRAMEWORK_INTERACTIONS = (
    ("ai_readiness_index", "renewable_energy_pct"),
    ("carbon_intensity", "ai_energy_mwh"),
)

NOISE_FRACTION = 0.01

# readiness index at which ai adoption leaves its floor and reaches its ceiling
ADOPTION_READINESS_RANGE = (25.0, 70.0)


@dataclass(frozen=True)
class SurrogateTargets:
    features: np.ndarray
    feature_names: List[str]
    strategies: np.ndarray
    labels: Dict[str, np.ndarray]


def adoption_level(readiness: np.ndarray) -> np.ndarray:
    """Readiness index -> ai_adoption, linear between the readiness range and flat outside it"""
    low, high = ADOPTION_READINESS_RANGE
    return np.clip(1.0 + 9.0 * (readiness - low) / (high - low), 1.0, 10.0)


def map_to_strategies(frame: pd.DataFrame) -> np.ndarray:
    """Feature columns -> (n, 9) strategy matrix in VARIABLES order, clamped to the default bounds"""
    missing = [c for c in SOURCE_COLUMNS if c not in frame]
    if missing:
        raise ContractError(f"Table lacks columns {missing}")
    f = {c: frame[c].to_numpy(dtype=float) for c in SOURCE_COLUMNS}
    if any(np.any(np.isnan(v)) for v in f.values()):
        raise ContractError("Source columns contain missing values; impute first")
    return np.column_stack(
        [
            adoption_level(f["ai_readiness_index"]),
            np.clip(f["renewable_energy_pct"], 10.0, 100.0),
            np.clip(0.8 * f["energy_efficiency_index"], 5.0, 80.0),
            np.clip(f["innovation_index"], 20.0, 100.0),
            np.clip(1.0 + 9.0 * (f["regulatory_quality"] + 2.5) / 5.0, 1.0, 10.0),
            np.clip(f["ai_investment_per_capita"], 10.0, 1000.0),
            np.clip(f["ai_energy_mwh"], 50.0, 2000.0),
            np.clip(f["carbon_intensity"] * f["ai_energy_mwh"], 20.0, 1000.0),
            np.clip(f["ai_water_l"], 100.0, 5000.0),
        ]
    )


def build_targets(
    table: DataTable,
    w: Optional[WeightConfig] = None,
    c: Optional[ModelCoefficients] = None,
    seed: int = 42,
    noise_fraction: float = NOISE_FRACTION,
) -> SurrogateTargets:
    w = w or WeightConfig(0.6, 0.3, 0.1)
    c = c or ModelCoefficients()
    strategies = map_to_strategies(table.frame)
    clean = {
        "sustainability": sustainability_values(strategies, c),
        "resilience": resilience_values(strategies, c),
        "environmental": environmental_values(strategies, c),
        "composite": objective_values(strategies, w, c),
    }
    rng = np.random.default_rng(seed)
    labels = {}
    for name in COMPONENTS:
        values = clean[name]
        labels[name] = values + rng.normal(0.0, noise_fraction * float(values.std()), values.size)
    logger.info(f"Built {len(COMPONENTS)} surrogate targets for {values.size} rows")
    return SurrogateTargets(
        features=table.frame[list(SOURCE_COLUMNS)].to_numpy(dtype=float),
        feature_names=list(SOURCE_COLUMNS),
        strategies=strategies,
        labels=labels,
    )

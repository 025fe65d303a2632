import logging
import os
import sys
from typing import Dict, List, Optional

from dotenv import load_dotenv

from src.exceptions import ConfigError

# Load environment variables
load_dotenv()

current_dir = os.path.dirname(os.path.abspath(__file__))
project_root = os.path.dirname(os.path.dirname(current_dir))
if project_root not in sys.path:
    sys.path.append(project_root)

VERSION = "1.0.0"

# Logging Configuration
LOG_CONFIG = {
    "FORMAT": "%(asctime)s - %(levelname)s - %(message)s",
    "DATEFMT": "%Y-%m-%d %H:%M:%S",
    "LEVEL": os.getenv("ECOOPT_LOG_LEVEL", "INFO"),
}

# Run Configuration
RUN_DEFAULTS = {
    "seed": 42,
    "weights": [0.6, 0.3, 0.1],
    "out_dir": "out",
    "log_base": "e",
    "threads": 1,
    "no_timestamp": False,
    "max_iterations": 500,
    "tolerance": 1e-8,
    "delta": 0.5,
    "svg": False,
    "html": False,
    "data_dir": None,
    "missing_fraction": 0.0,
    "grid_points": 0,
    "folds": 5,
}

# Weight Configurations
WEIGHT_PRESETS = {
    "Sustainability-focused": {"alpha": 0.60, "beta": 0.30, "gamma": 0.10},
    "Resilience-focused": {"alpha": 0.30, "beta": 0.60, "gamma": 0.10},
    "Environment-focused": {"alpha": 0.20, "beta": 0.20, "gamma": 0.60},
    "Balanced": {"alpha": 0.33, "beta": 0.33, "gamma": 0.34},
    "Sustainability-resilience": {"alpha": 0.50, "beta": 0.40, "gamma": 0.10},
}

SENSITIVITY_LEVELS = {
    "High": 10.0,
    "Medium": 5.0,
}

# Published figures, kept only to print divergence notes next to verified values
PUBLISHED_REFERENCE = {
    "optimum": {
        "ai_adoption": 10.0,
        "renewable_energy": 100.0,
        "efficiency_gain": 80.0,
        "innovation_index": 100.0,
        "market_stability": 10.0,
        "ai_investment": 202.48,
        "energy_consumption": 798.9,
        "carbon_emissions": 297.8,
        "water_usage": 1499.8,
    },
    "objective": 2.05,
    "sensitivity_pct": {
        "ai_adoption": 15.0,
        "renewable_energy": 12.0,
        "innovation_index": 10.0,
        "market_stability": 4.0,
        "carbon_emissions": 5.0,
        "water_usage": 3.0,
        "energy_consumption": 8.0,
        "ai_investment": 9.0,
        "efficiency_gain": 7.0,
    },
    "top_country_composite": 53.73,
    "top_country_component_mean": 50.65,
    "correlations": {
        "economic_complexity_index|resilience_score": 0.82,
        "renewable_energy_pct|sustainability_score": 0.71,
        "environmental_policy_score|sustainability_score": 0.55,
        "innovation_index|ai_readiness_index": 0.48,
        "gdp_per_capita|digital_infrastructure_score": 0.43,
    },
    # first-year average, last-year average, annual change
    "trends": {
        "sustainability_score": (52.1, 60.1, 0.89),
        "ai_readiness_index": (35.2, 45.3, 1.12),
        "renewable_energy_pct": (46.8, 52.8, 0.67),
        "carbon_intensity": (0.485, 0.377, -0.012),
        "innovation_index": (58.3, 65.7, 0.82),
    },
    "component_cv_r2": {
        "sustainability": 0.981,
        "resilience": 0.990,
        "environmental": 0.999,
        "composite": 0.982,
    },
    "model_r2": {
        "Linear Regression": 0.943,
        "Random Forest": 0.957,
        "Gradient Boosting": 0.989,
        "EcoAI Framework": 0.996,
    },
}


def get_env_seed() -> Optional[int]:
    """Seed fallback from ECOOPT_SEED, read at call time"""
    raw = os.getenv("ECOOPT_SEED")
    if raw is None or raw.strip() == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"ECOOPT_SEED must be an integer, got '{raw}'")


def get_env_out_dir() -> Optional[str]:
    return os.getenv("ECOOPT_OUT_DIR") or None


def weight_presets() -> List[Dict]:
    return [{"label": label, **weights} for label, weights in WEIGHT_PRESETS.items()]


def setup_logging(level: Optional[str] = None) -> None:
    """Configure console logging once for CLI runs"""
    logging.basicConfig(
        level=getattr(logging, (level or LOG_CONFIG["LEVEL"]).upper(), logging.INFO),
        format=LOG_CONFIG["FORMAT"],
        datefmt=LOG_CONFIG["DATEFMT"],
    )

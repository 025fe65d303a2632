import argparse
import json
import logging
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Dict, List, Optional

from src.config.config import RUN_DEFAULTS, VERSION, get_env_out_dir, get_env_seed
from src.exceptions import ConfigError, ContractError
from src.model.domain import DEFAULT_BOUNDS, BoundsSet, ModelCoefficients, WeightConfig
from src.optimization.solver import SolverConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    seed: int = RUN_DEFAULTS["seed"]
    weights: tuple = tuple(RUN_DEFAULTS["weights"])
    out_dir: str = RUN_DEFAULTS["out_dir"]
    log_base: str = RUN_DEFAULTS["log_base"]
    threads: int = RUN_DEFAULTS["threads"]
    no_timestamp: bool = RUN_DEFAULTS["no_timestamp"]
    max_iterations: int = RUN_DEFAULTS["max_iterations"]
    tolerance: float = RUN_DEFAULTS["tolerance"]
    delta: float = RUN_DEFAULTS["delta"]
    svg: bool = RUN_DEFAULTS["svg"]
    html: bool = RUN_DEFAULTS["html"]
    data_dir: Optional[str] = RUN_DEFAULTS["data_dir"]
    missing_fraction: float = RUN_DEFAULTS["missing_fraction"]
    grid_points: int = RUN_DEFAULTS["grid_points"]
    folds: int = RUN_DEFAULTS["folds"]
    coefficients: Optional[Dict] = None
    bounds: Optional[Dict] = None
    version: str = VERSION

    @classmethod
    def keys(cls) -> List[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def from_file(cls, path) -> Dict:
        """Values from a JSON config file; unknown keys are rejected"""
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"Config file {path} not found")
        except json.JSONDecodeError as e:
            raise ConfigError(f"Config file {path} is not valid JSON: {e}")
        if not isinstance(data, dict):
            raise ConfigError(f"Config file {path} must hold a JSON object")
        unknown = set(data) - set(cls.keys())
        if unknown:
            raise ConfigError(f"Unknown config keys: {sorted(unknown)}")
        return data

    @classmethod
    def resolve(cls, args: argparse.Namespace) -> "RunConfig":
        """flag > config file > environment > default"""
        values = {}
        env_seed = get_env_seed()
        if env_seed is not None:
            values["seed"] = env_seed
        env_out = get_env_out_dir()
        if env_out is not None:
            values["out_dir"] = env_out

        if getattr(args, "config", None):
            values.update(cls.from_file(args.config))

        flags = {
            "seed": getattr(args, "seed", None),
            "out_dir": getattr(args, "out", None),
            "log_base": getattr(args, "log_base", None),
            "threads": getattr(args, "threads", None),
            "delta": getattr(args, "delta", None),
            "data_dir": getattr(args, "data_dir", None),
            "missing_fraction": getattr(args, "missing", None),
            "grid_points": getattr(args, "grid_points", None),
        }
        values.update({k: v for k, v in flags.items() if v is not None})
        if getattr(args, "weights", None):
            values["weights"] = WeightConfig.parse(args.weights).to_dict()
        for switch in ("no_timestamp", "svg", "html"):
            if getattr(args, switch, False):
                values[switch] = True

        try:
            weights = values.get("weights", RUN_DEFAULTS["weights"])
            if isinstance(weights, dict):
                weights = (weights["alpha"], weights["beta"], weights["gamma"])
            values["weights"] = tuple(float(w) for w in weights)
            config = cls(**values)
            config.validate()
        except (KeyError, TypeError) as e:
            raise ConfigError(f"Invalid configuration value: {e}")
        except ValueError as e:
            if isinstance(e, (ConfigError, ContractError)):
                raise
            raise ConfigError(f"Invalid configuration value: {e}")
        return config

    def validate(self) -> None:
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if int(self.threads) < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        if self.log_base not in ("e", "10"):
            raise ConfigError(f"log_base must be 'e' or '10', got '{self.log_base}'")
        if len(self.weights) != 3:
            raise ContractError(f"weights need three values, got {self.weights}")

    def weight_config(self) -> WeightConfig:
        return WeightConfig(*self.weights)

    def model_coefficients(self) -> ModelCoefficients:
        return ModelCoefficients.from_dict({**(self.coefficients or {}), "log_base": self.log_base})

    def bounds_set(self) -> BoundsSet:
        return BoundsSet.from_dict({**DEFAULT_BOUNDS, **self.bounds}) if self.bounds else BoundsSet()

    def solver_config(self) -> SolverConfig:
        return SolverConfig(max_iterations=int(self.max_iterations), tolerance=float(self.tolerance))

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["weights"] = list(self.weights)
        return data

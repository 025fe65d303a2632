import math
from dataclasses import asdict, dataclass, field, fields
from typing import Dict, Iterable, Tuple

import numpy as np

from src.exceptions import ContractError

VARIABLES: Tuple[str, ...] = (
    "ai_adoption",
    "renewable_energy",
    "efficiency_gain",
    "innovation_index",
    "market_stability",
    "ai_investment",
    "energy_consumption",
    "carbon_emissions",
    "water_usage",
)

# Variables that raise the objective; the rest are environmental costs
BENEFIT_VARIABLES: Tuple[str, ...] = VARIABLES[:6]

UNITS = {
    "ai_adoption": "scale 1-10",
    "renewable_energy": "percent",
    "efficiency_gain": "percent",
    "innovation_index": "scale 0-100",
    "market_stability": "scale 1-10",
    "ai_investment": "USD per capita",
    "energy_consumption": "MWh",
    "carbon_emissions": "tons CO2",
    "water_usage": "liters",
}

DEFAULT_BOUNDS = {
    "ai_adoption": (1.0, 10.0),
    "renewable_energy": (10.0, 100.0),
    "efficiency_gain": (5.0, 80.0),
    "innovation_index": (20.0, 100.0),
    "market_stability": (1.0, 10.0),
    "ai_investment": (10.0, 1000.0),
    "energy_consumption": (50.0, 2000.0),
    "carbon_emissions": (20.0, 1000.0),
    "water_usage": (100.0, 5000.0),
}

SIMPLEX_TOLERANCE = 1e-9


def _check_keys(data: Dict, expected: Iterable[str], what: str) -> None:
    expected = set(expected)
    missing = expected - set(data)
    unknown = set(data) - expected
    if missing:
        raise ContractError(f"{what}: missing keys {sorted(missing)}")
    if unknown:
        raise ContractError(f"{what}: unknown keys {sorted(unknown)}")


@dataclass(frozen=True)
class DeploymentStrategy:
    ai_adoption: float
    renewable_energy: float
    efficiency_gain: float
    innovation_index: float
    market_stability: float
    ai_investment: float
    energy_consumption: float
    carbon_emissions: float
    water_usage: float

    @classmethod
    def initial(cls) -> "DeploymentStrategy":
        """Starting point used by the solver when none is configured"""
        return cls(5.0, 50.0, 40.0, 60.0, 6.0, 200.0, 800.0, 300.0, 1500.0)

    @classmethod
    def from_array(cls, values) -> "DeploymentStrategy":
        values = np.asarray(values, dtype=float).ravel()
        if values.shape != (len(VARIABLES),):
            raise ContractError(
                f"Expected {len(VARIABLES)} values, got shape {values.shape}"
            )
        return cls(*(float(v) for v in values))

    def to_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in VARIABLES], dtype=float)

    def to_dict(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in VARIABLES}

    @classmethod
    def from_dict(cls, data: Dict) -> "DeploymentStrategy":
        _check_keys(data, VARIABLES, "DeploymentStrategy")
        return cls(**{name: float(data[name]) for name in VARIABLES})

    def replace(self, **changes) -> "DeploymentStrategy":
        values = self.to_dict()
        values.update({k: float(v) for k, v in changes.items()})
        return DeploymentStrategy(**values)


@dataclass(frozen=True)
class WeightConfig:
    alpha: float
    beta: float
    gamma: float
    strict: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if self.strict:
            self.validate()

    def validate(self) -> None:
        values = (self.alpha, self.beta, self.gamma)
        if not all(math.isfinite(v) for v in values):
            raise ContractError(f"Weights must be finite: {values}")
        if any(v < 0 for v in values):
            raise ContractError(f"Weights must be non-negative: {values}")
        if abs(sum(values) - 1.0) > SIMPLEX_TOLERANCE:
            raise ContractError(
                f"Weights must sum to 1 (alpha + beta + gamma = {sum(values):.12g})"
            )

    @classmethod
    def parse(cls, text: str) -> "WeightConfig":
        """Parse the CLI form 'a,b,c'"""
        try:
            parts = [float(p) for p in text.split(",")]
        except ValueError:
            raise ContractError(f"Weights must be three numbers, got '{text}'")
        if len(parts) != 3:
            raise ContractError(f"Weights must be three numbers, got '{text}'")
        return cls(*parts)

    def to_dict(self) -> Dict[str, float]:
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma}

    @classmethod
    def from_dict(cls, data: Dict) -> "WeightConfig":
        _check_keys(data, ("alpha", "beta", "gamma"), "WeightConfig")
        return cls(float(data["alpha"]), float(data["beta"]), float(data["gamma"]))


@dataclass(frozen=True)
class ModelCoefficients:
    a1: float = 0.6
    a2: float = 0.4
    b1: float = 0.4
    b2: float = 0.4
    b3: float = 0.2
    g1: float = 0.4
    g2: float = 0.4
    g3: float = 0.2
    norm_energy: float = 2000.0
    norm_carbon: float = 1000.0
    norm_water: float = 5000.0
    log_base: str = "e"
    strict: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if self.log_base not in ("e", "10"):
            raise ContractError(f"log_base must be 'e' or '10', got '{self.log_base}'")
        if self.strict:
            self.validate()

    def validate(self) -> None:
        numeric = {
            f.name: getattr(self, f.name)
            for f in fields(self)
            if f.name not in ("log_base", "strict")
        }
        for name, value in numeric.items():
            if not math.isfinite(value) or value <= 0:
                raise ContractError(f"Coefficient {name} must be > 0, got {value}")
        groups = {
            "a1+a2": self.a1 + self.a2,
            "b1+b2+b3": self.b1 + self.b2 + self.b3,
            "g1+g2+g3": self.g1 + self.g2 + self.g3,
        }
        for label, total in groups.items():
            if abs(total - 1.0) > SIMPLEX_TOLERANCE:
                raise ContractError(f"{label} must equal 1, got {total:.12g}")

    @property
    def log_scale(self) -> float:
        """Divisor turning a natural log into the configured base"""
        return 1.0 if self.log_base == "e" else math.log(10.0)

    def to_dict(self) -> Dict:
        data = asdict(self)
        data.pop("strict")
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "ModelCoefficients":
        known = {f.name for f in fields(cls)} - {"strict"}
        unknown = set(data) - known
        if unknown:
            raise ContractError(f"ModelCoefficients: unknown keys {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class BoundsSet:
    intervals: Dict[str, Tuple[float, float]] = field(
        default_factory=lambda: dict(DEFAULT_BOUNDS)
    )

    def __post_init__(self):
        _check_keys(self.intervals, VARIABLES, "BoundsSet")
        for name in VARIABLES:
            lower, upper = self.intervals[name]
            if not (math.isfinite(lower) and math.isfinite(upper)) or lower >= upper:
                raise ContractError(
                    f"Bounds for {name} must satisfy lower < upper, got ({lower}, {upper})"
                )

    @property
    def lower(self) -> np.ndarray:
        return np.array([self.intervals[n][0] for n in VARIABLES], dtype=float)

    @property
    def upper(self) -> np.ndarray:
        return np.array([self.intervals[n][1] for n in VARIABLES], dtype=float)

    @property
    def span(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, strategy: DeploymentStrategy) -> bool:
        x = strategy.to_array()
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def violations(self, strategy: DeploymentStrategy) -> Dict[str, float]:
        out = {}
        for name, value in strategy.to_dict().items():
            lower, upper = self.intervals[name]
            if value < lower or value > upper:
                out[name] = value
        return out

    def to_dict(self) -> Dict[str, list]:
        return {name: list(self.intervals[name]) for name in VARIABLES}

    @classmethod
    def from_dict(cls, data: Dict) -> "BoundsSet":
        return cls({name: (float(v[0]), float(v[1])) for name, v in data.items()})

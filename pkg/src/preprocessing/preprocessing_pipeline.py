import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from src.datagen.data_table import NUMERIC, DataTable
from src.exceptions import ContractError, FitError

logger = logging.getLogger(__name__)

OUTLIER_ACTIONS = ("winsorize", "drop", "none")

DEFAULT_INTERACTIONS: Tuple[Tuple[str, str], ...] = (
    ("sustainability_score", "resilience_score"),
)


@dataclass(frozen=True)
class PipelineConfig:
    impute: bool = True
    scale: bool = True
    iqr_multiplier: float = 1.5
    outlier_action: str = "winsorize"
    interaction_pairs: Tuple[Tuple[str, str], ...] = DEFAULT_INTERACTIONS
    std_ddof: int = 0

    def __post_init__(self):
        if not self.iqr_multiplier > 0:
            raise ContractError(f"iqr_multiplier must be > 0, got {self.iqr_multiplier}")
        if self.outlier_action not in OUTLIER_ACTIONS:
            raise ContractError(
                f"outlier_action must be one of {OUTLIER_ACTIONS}, got '{self.outlier_action}'"
            )
        if self.std_ddof not in (0, 1):
            raise ContractError(f"std_ddof must be 0 or 1, got {self.std_ddof}")

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["interaction_pairs"] = [list(p) for p in self.interaction_pairs]
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "PipelineConfig":
        data = dict(data)
        data["interaction_pairs"] = tuple(tuple(p) for p in data.get("interaction_pairs", ()))
        return cls(**data)


@dataclass(frozen=True)
class ColumnStats:
    mean: float
    std: float
    q1: float
    q3: float

    @property
    def iqr(self) -> float:
        return self.q3 - self.q1

    def fences(self, multiplier: float) -> Tuple[float, float]:
        return self.q1 - multiplier * self.iqr, self.q3 + multiplier * self.iqr


@dataclass
class FittedPipeline:
    config: PipelineConfig
    columns: List[str]
    kinds: Dict[str, str]
    key_columns: Tuple[str, ...]
    numeric: Dict[str, ColumnStats]
    modes: Dict[str, str]
    interactions: List[Tuple[str, str]]
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            "config": self.config.to_dict(),
            "columns": list(self.columns),
            "kinds": dict(self.kinds),
            "key_columns": list(self.key_columns),
            "numeric": {name: asdict(stats) for name, stats in self.numeric.items()},
            "modes": dict(self.modes),
            "interactions": [list(p) for p in self.interactions],
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "FittedPipeline":
        return cls(
            config=PipelineConfig.from_dict(data["config"]),
            columns=list(data["columns"]),
            kinds=dict(data["kinds"]),
            key_columns=tuple(data["key_columns"]),
            numeric={name: ColumnStats(**s) for name, s in data["numeric"].items()},
            modes=dict(data["modes"]),
            interactions=[tuple(p) for p in data["interactions"]],
            notes=list(data.get("notes", [])),
        )

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "FittedPipeline":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


class PreprocessingPipeline:
    """Impute -> outlier handling -> z-score -> interaction features.

    Statistics come from the fitting table only, so the same fitted pipeline
    can transform held-out data without leakage.
    """

    def __init__(self, config: Optional[PipelineConfig] = None):
        self.config = config or PipelineConfig()

    def fit(self, table: DataTable) -> FittedPipeline:
        try:
            logger.info(f"Starting pipeline fit on '{table.name}' ({table.n_rows} rows)")
            if table.n_rows == 0:
                raise ContractError(f"Cannot fit on empty table '{table.name}'")
            frame = table.frame

            numeric = {}
            for column in table.value_columns:
                observed = frame[column].dropna().to_numpy(dtype=float)
                if observed.size == 0:
                    raise FitError(f"Column '{column}' has no observed values")
                q1, q3 = np.quantile(observed, [0.25, 0.75])
                numeric[column] = ColumnStats(
                    mean=float(observed.mean()),
                    std=float(observed.std(ddof=self.config.std_ddof))
                    if observed.size > self.config.std_ddof
                    else 0.0,
                    q1=float(q1),
                    q3=float(q3),
                )

            modes = {}
            for column in table.categorical_columns:
                if column in table.key_columns:
                    continue
                observed = frame[column].dropna()
                if observed.empty:
                    raise FitError(f"Column '{column}' has no observed values")
                modes[column] = str(sorted(observed.mode().astype(str))[0])

            interactions, notes = [], []
            for a, b in self.config.interaction_pairs:
                if a in numeric and b in numeric:
                    interactions.append((a, b))
                else:
                    notes.append(f"interaction {a} x {b} skipped: column not in table")

            logger.info(
                f"Successfully fitted {len(numeric)} numeric and {len(modes)} categorical columns"
            )
            return FittedPipeline(
                config=self.config,
                columns=table.columns,
                kinds=dict(table.kinds),
                key_columns=tuple(table.key_columns),
                numeric=numeric,
                modes=modes,
                interactions=interactions,
                notes=notes,
            )
        except Exception as e:
            logger.error(f"Error during pipeline fit: {e}")
            raise

    @staticmethod
    def transform(fitted: FittedPipeline, table: DataTable) -> DataTable:
        try:
            if table.columns != fitted.columns or dict(table.kinds) != fitted.kinds:
                raise ContractError(
                    f"Schema of '{table.name}' does not match the fitted schema"
                )
            cfg = fitted.config
            frame = table.frame.copy()
            notes = list(table.notes) + list(fitted.notes)

            if cfg.impute:
                for column, stats in fitted.numeric.items():
                    frame[column] = frame[column].astype(float).fillna(stats.mean)
                for column, mode in fitted.modes.items():
                    frame[column] = frame[column].fillna(mode)

            if cfg.outlier_action == "winsorize":
                for column, stats in fitted.numeric.items():
                    lower, upper = stats.fences(cfg.iqr_multiplier)
                    frame[column] = frame[column].clip(lower=lower, upper=upper)
            elif cfg.outlier_action == "drop":
                outside = pd.Series(False, index=frame.index)
                for column, stats in fitted.numeric.items():
                    lower, upper = stats.fences(cfg.iqr_multiplier)
                    outside |= (frame[column] < lower) | (frame[column] > upper)
                if outside.any():
                    notes.append(f"dropped {int(outside.sum())} rows outside IQR fences")
                frame = frame.loc[~outside].reset_index(drop=True)

            if cfg.scale:
                for column, stats in fitted.numeric.items():
                    if stats.std == 0.0:
                        logger.warning(f"Column '{column}' has zero std, left unscaled")
                        notes.append(f"{column}: zero std, left unscaled")
                        continue
                    frame[column] = (frame[column].astype(float) - stats.mean) / stats.std

            kinds = dict(table.kinds)
            for a, b in fitted.interactions:
                name = f"{a}_x_{b}"
                frame[name] = frame[a] * frame[b]
                kinds[name] = NUMERIC

            out = DataTable(
                name=table.name,
                frame=frame,
                kinds=kinds,
                key_columns=table.key_columns,
                notes=notes,
            )
            logger.info(f"Transform complete. Final record count: {out.n_rows}")
            return out
        except Exception as e:
            logger.error(f"Error during pipeline transform: {e}")
            raise


def fit(table: DataTable, config: Optional[PipelineConfig] = None) -> FittedPipeline:
    return PreprocessingPipeline(config).fit(table)


def transform(fitted: FittedPipeline, table: DataTable) -> DataTable:
    return PreprocessingPipeline.transform(fitted, table)

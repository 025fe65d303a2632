import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from src.exceptions import ContractError

logger = logging.getLogger(__name__)

NUMERIC = "numeric"
CATEGORICAL = "categorical"

# Identifier columns never imputed, winsorized or scaled
KEY_COLUMNS: Tuple[str, ...] = ("country", "year", "sector", "company", "model_id")


@dataclass
class DataTable:
    """A named pandas frame plus the numeric/categorical kind of each column"""

    name: str
    frame: pd.DataFrame
    kinds: Dict[str, str]
    key_columns: Tuple[str, ...] = ()
    notes: List[str] = field(default_factory=list)

    def __post_init__(self):
        columns = list(self.frame.columns)
        if set(columns) != set(self.kinds):
            raise ContractError(
                f"Table '{self.name}': kinds do not match columns {columns}"
            )
        for column, kind in self.kinds.items():
            if kind not in (NUMERIC, CATEGORICAL):
                raise ContractError(f"Column '{column}' has unknown kind '{kind}'")
        numeric = self.numeric_columns
        if numeric:
            values = self.frame[numeric].to_numpy(dtype=float)
            if np.any(np.isinf(values)):
                raise ContractError(f"Table '{self.name}' holds infinite numeric values")

    @property
    def columns(self) -> List[str]:
        return list(self.frame.columns)

    @property
    def numeric_columns(self) -> List[str]:
        return [c for c in self.frame.columns if self.kinds[c] == NUMERIC]

    @property
    def categorical_columns(self) -> List[str]:
        return [c for c in self.frame.columns if self.kinds[c] == CATEGORICAL]

    @property
    def value_columns(self) -> List[str]:
        """Numeric columns that are not identifiers"""
        return [c for c in self.numeric_columns if c not in self.key_columns]

    @property
    def n_rows(self) -> int:
        return len(self.frame)

    def with_frame(self, frame: pd.DataFrame, kinds: Optional[Dict[str, str]] = None) -> "DataTable":
        return DataTable(
            name=self.name,
            frame=frame,
            kinds=dict(kinds if kinds is not None else self.kinds),
            key_columns=self.key_columns,
            notes=list(self.notes),
        )

    def copy(self) -> "DataTable":
        return self.with_frame(self.frame.copy())

    def write_csv(self, path: Union[str, Path]) -> Path:
        """UTF-8, header row, '\\n' line endings, empty field for missing"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.frame.to_csv(path, index=False, na_rep="", lineterminator="\n", encoding="utf-8")
        logger.info(f"Wrote {self.n_rows} rows of '{self.name}' to {path}")
        return path

    @classmethod
    def read_csv(
        cls,
        path: Union[str, Path],
        name: Optional[str] = None,
        key_columns: Sequence[str] = KEY_COLUMNS,
    ) -> "DataTable":
        path = Path(path)
        try:
            frame = pd.read_csv(path, encoding="utf-8")
        except pd.errors.EmptyDataError:
            raise ContractError(f"{path} holds no data")
        kinds = {
            column: NUMERIC if pd.api.types.is_numeric_dtype(frame[column]) else CATEGORICAL
            for column in frame.columns
        }
        keys = tuple(c for c in frame.columns if c in key_columns)
        logger.info(f"Read {len(frame)} rows from {path}")
        return cls(name=name or path.stem, frame=frame, kinds=kinds, key_columns=keys)

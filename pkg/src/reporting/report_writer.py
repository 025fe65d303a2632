import json
import logging
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from src.config.config import VERSION
from src.datagen.data_table import DataTable
from src.exceptions import ConfigError

logger = logging.getLogger(__name__)

Records = Union[pd.DataFrame, Sequence[Dict]]


def ensure_output_dir(out_dir: Union[str, Path]) -> Path:
    """Create the directory and prove it is writable before any work starts"""
    path = Path(out_dir)
    try:
        path.mkdir(parents=True, exist_ok=True)
        marker = path / ".write_check"
        marker.write_text("", encoding="utf-8")
        marker.unlink()
    except OSError as e:
        raise ConfigError(f"Output directory {path} is not writable: {e}")
    return path


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return _jsonable(value.item())
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _cell(value, digits: int) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "yes" if value else "no"
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return ""
        return f"{value:.{digits}f}"
    return str(value).replace("|", "\\|")


def markdown_table(records: Records, columns: Optional[List[str]] = None, digits: int = 4) -> str:
    """GitHub pipe table; floats rendered with a fixed number of decimals"""
    frame = records if isinstance(records, pd.DataFrame) else pd.DataFrame(list(records))
    columns = columns or list(frame.columns)
    lines = [
        "| " + " | ".join(columns) + " |",
        "| " + " | ".join("---" for _ in columns) + " |",
    ]
    for row in frame[columns].itertuples(index=False):
        lines.append("| " + " | ".join(_cell(v, digits) for v in row) + " |")
    return "\n".join(lines)


class ReportWriter:
    """Owns one output directory and records everything written to it"""

    def __init__(self, out_dir: Union[str, Path], command: str, seed: Optional[int] = None,
                 no_timestamp: bool = False):
        self.out_dir = ensure_output_dir(out_dir)
        self.command = command
        self.seed = seed
        self.no_timestamp = no_timestamp
        self.files: List[str] = []
        logger.info(f"ReportWriter initialized for '{command}' in {self.out_dir}")

    def _register(self, path: Path) -> Path:
        name = path.relative_to(self.out_dir).as_posix()
        if name not in self.files:
            self.files.append(name)
        return path

    def write_csv(self, name: str, records: Records, columns: Optional[List[str]] = None) -> Path:
        frame = records if isinstance(records, pd.DataFrame) else pd.DataFrame(list(records))
        if columns is not None:
            frame = frame[columns]
        path = self.out_dir / name
        try:
            frame.to_csv(path, index=False, na_rep="", lineterminator="\n", encoding="utf-8")
        except Exception as e:
            logger.error(f"Error writing {path}: {e}")
            raise
        logger.info(f"Successfully wrote {len(frame)} rows to {path}")
        return self._register(path)

    def write_table(self, table: DataTable, name: Optional[str] = None) -> Path:
        path = table.write_csv(self.out_dir / (name or f"{table.name}.csv"))
        return self._register(path)

    def write_json(self, name: str, payload) -> Path:
        path = self.out_dir / name
        path.write_text(
            json.dumps(_jsonable(payload), indent=2, sort_keys=False) + "\n", encoding="utf-8"
        )
        logger.info(f"Successfully wrote {path}")
        return self._register(path)

    def write_text(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        path.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
        return self._register(path)

    def write_markdown(self, name: str, title: str, sections: Iterable) -> Path:
        """``sections`` holds (heading, body) pairs; body is text or a pre-rendered table"""
        parts = [f"# {title}", ""]
        for heading, body in sections:
            if heading:
                parts.extend([f"## {heading}", ""])
            parts.extend([body.rstrip(), ""])
        return self.write_text(name, "\n".join(parts))

    def write_manifest(self, extra: Optional[Dict] = None) -> Path:
        manifest = {"version": VERSION, "command": self.command, "seed": self.seed}
        if not self.no_timestamp:
            manifest["created_at"] = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        manifest.update(extra or {})
        manifest["files"] = sorted(self.files)
        return self.write_json("manifest.json", manifest)

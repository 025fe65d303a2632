"""Seeded synthetic tables with target moments, correlations and year trends.

Construction: standard normals are made exactly orthogonal to the intercept,
the centred year and any group indicators, whitened to identity sample
covariance and coloured with the Cholesky factor of a latent correlation
matrix. Before clipping, every column therefore has its target mean, standard
deviation, year slope and targeted correlations exactly. Clipping to the
declared range attenuates them; a few calibration passes stretch the latent
targets to compensate.
"""

import dataclasses
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from src.datagen.data_table import CATEGORICAL, NUMERIC, DataTable
from src.exceptions import ContractError, SpecError
from src.stats.statistical_tests import pearson_r, trend_slope

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 5
MAX_CALIBRATION_PASSES = 4
FIDELITY_MIN_ROWS = 500
CORRELATION_TOLERANCE = 0.05
SLOPE_TOLERANCE = 0.15
CORRELATION_STRETCH = (0.9, 1.1)
SLOPE_STRETCH = (0.85, 1.15)
EIGEN_FLOOR = 1e-8
MAX_MISSING_FRACTION = 0.05


def _unknown_keys(data: Dict, allowed, what: str) -> None:
    unknown = set(data) - set(allowed)
    if unknown:
        raise SpecError(f"{what}: unknown keys {sorted(unknown)}")


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    lo: float
    hi: float
    mean: Optional[float] = None
    std: Optional[float] = None
    slope: float = 0.0
    group_means: Optional[Dict[str, float]] = None

    @property
    def target_mean(self) -> float:
        return self.mean if self.mean is not None else (self.lo + self.hi) / 2.0

    @property
    def target_std(self) -> float:
        return self.std if self.std is not None else (self.hi - self.lo) / 6.0

    def validate(self) -> None:
        if not self.lo < self.hi:
            raise SpecError(f"Column '{self.name}': lo must be < hi, got [{self.lo}, {self.hi}]")
        if not self.lo <= self.target_mean <= self.hi:
            raise SpecError(f"Column '{self.name}': mean {self.target_mean} outside range")
        if self.target_std < 0:
            raise SpecError(f"Column '{self.name}': std must be >= 0")

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "lo": self.lo,
            "hi": self.hi,
            "mean": self.mean,
            "std": self.std,
            "slope": self.slope,
            "group_means": dict(self.group_means) if self.group_means else None,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "ColumnSpec":
        _unknown_keys(data, [f.name for f in dataclasses.fields(cls)], "ColumnSpec")
        try:
            return cls(
                name=str(data["name"]),
                lo=float(data["lo"]),
                hi=float(data["hi"]),
                mean=None if data.get("mean") is None else float(data["mean"]),
                std=None if data.get("std") is None else float(data["std"]),
                slope=float(data.get("slope") or 0.0),
                group_means={str(k): float(v) for k, v in data["group_means"].items()}
                if data.get("group_means")
                else None,
            )
        except KeyError as e:
            raise SpecError(f"ColumnSpec: missing key {e}")


@dataclass(frozen=True)
class CorrelationTarget:
    a: str
    b: str
    r: float

    def to_dict(self) -> Dict:
        return {"a": self.a, "b": self.b, "r": self.r}

    @classmethod
    def from_dict(cls, data: Dict) -> "CorrelationTarget":
        _unknown_keys(data, ("a", "b", "r"), "CorrelationTarget")
        return cls(str(data["a"]), str(data["b"]), float(data["r"]))


@dataclass(frozen=True)
class EntitySpec:
    """Row layout: entities x years x records_per_cell, or entities alone when no years"""

    entity_column: str = "country"
    entity_prefix: str = "Country"
    n_entities: int = 1
    year_start: Optional[int] = None
    year_end: Optional[int] = None
    records_per_cell: int = 1
    group_column: Optional[str] = None
    groups: Tuple[str, ...] = ()

    @property
    def years(self) -> List[int]:
        if self.year_start is None:
            return []
        return list(range(self.year_start, self.year_end + 1))

    @property
    def n_rows(self) -> int:
        return self.n_entities * max(len(self.years), 1) * self.records_per_cell

    def validate(self) -> None:
        if self.n_entities < 1 or self.records_per_cell < 1:
            raise SpecError("n_entities and records_per_cell must be >= 1")
        if (self.year_start is None) != (self.year_end is None):
            raise SpecError("year_start and year_end must be given together")
        if self.year_start is not None and self.year_end < self.year_start:
            raise SpecError("year_end must not precede year_start")
        if self.group_column is not None and not self.groups:
            raise SpecError(f"Group column '{self.group_column}' has no groups")

    def entity_names(self) -> List[str]:
        width = max(2, len(str(self.n_entities)))
        return [f"{self.entity_prefix}-{i + 1:0{width}d}" for i in range(self.n_entities)]

    def build_frame(self) -> pd.DataFrame:
        years = self.years
        per_entity = max(len(years), 1) * self.records_per_cell
        frame = pd.DataFrame(
            {self.entity_column: np.repeat(self.entity_names(), per_entity)}
        )
        if years:
            frame["year"] = np.tile(np.repeat(years, self.records_per_cell), self.n_entities)
        if self.group_column is not None:
            frame[self.group_column] = [
                self.groups[i % len(self.groups)] for i in range(len(frame))
            ]
        return frame

    def to_dict(self) -> Dict:
        data = dataclasses.asdict(self)
        data["groups"] = list(self.groups)
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "EntitySpec":
        _unknown_keys(data, [f.name for f in dataclasses.fields(cls)], "EntitySpec")
        data = dict(data)
        data["groups"] = tuple(data.get("groups") or ())
        return cls(**data)


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    columns: Tuple[ColumnSpec, ...]
    entities: EntitySpec
    correlations: Tuple[CorrelationTarget, ...] = ()
    seed: int = 42
    notes: Tuple[str, ...] = ()
    enforce_fidelity: Optional[bool] = None

    @property
    def n_rows(self) -> int:
        return self.entities.n_rows

    @property
    def column_names(self) -> List[str]:
        return [c.name for c in self.columns]

    def with_seed(self, seed: int) -> "GeneratorSpec":
        return dataclasses.replace(self, seed=int(seed))

    def validate(self) -> None:
        if not 0 <= int(self.seed) < 2**64:
            raise SpecError(f"Seed must be a 64-bit unsigned integer, got {self.seed}")
        self.entities.validate()
        names = self.column_names
        if len(set(names)) != len(names):
            raise SpecError(f"Spec '{self.name}' has duplicate column names")
        reserved = {self.entities.entity_column, "year", self.entities.group_column}
        clash = reserved & set(names)
        if clash:
            raise SpecError(f"Columns {sorted(clash)} clash with entity columns")
        for column in self.columns:
            column.validate()
            if column.group_means is not None:
                if self.entities.group_column is None:
                    raise SpecError(f"Column '{column.name}' has group means but no group column")
                missing = set(self.entities.groups) - set(column.group_means)
                if missing:
                    raise SpecError(f"Column '{column.name}' lacks group means for {sorted(missing)}")
        by_name = {c.name: c for c in self.columns}
        seen = set()
        for target in self.correlations:
            if target.a not in by_name or target.b not in by_name or target.a == target.b:
                raise SpecError(f"Correlation target {target.a}/{target.b} names unknown columns")
            if not -1.0 <= target.r <= 1.0:
                raise SpecError(f"Correlation {target.a}/{target.b} must lie in [-1, 1]")
            if by_name[target.a].target_std == 0 or by_name[target.b].target_std == 0:
                raise SpecError(f"Correlation {target.a}/{target.b} involves a constant column")
            pair = frozenset((target.a, target.b))
            if pair in seen:
                raise SpecError(f"Duplicate correlation target {target.a}/{target.b}")
            seen.add(pair)

    def correlation_matrix(self) -> np.ndarray:
        index = {name: i for i, name in enumerate(self.column_names)}
        matrix = np.eye(len(index))
        for target in self.correlations:
            i, j = index[target.a], index[target.b]
            matrix[i, j] = matrix[j, i] = target.r
        return matrix

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "seed": int(self.seed),
            "entities": self.entities.to_dict(),
            "columns": [c.to_dict() for c in self.columns],
            "correlations": [t.to_dict() for t in self.correlations],
            "notes": list(self.notes),
            "enforce_fidelity": self.enforce_fidelity,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "GeneratorSpec":
        _unknown_keys(data, [f.name for f in dataclasses.fields(cls)], "GeneratorSpec")
        try:
            spec = cls(
                name=str(data["name"]),
                columns=tuple(ColumnSpec.from_dict(c) for c in data["columns"]),
                entities=EntitySpec.from_dict(data["entities"]),
                correlations=tuple(
                    CorrelationTarget.from_dict(t) for t in data.get("correlations", [])
                ),
                seed=int(data.get("seed", 42)),
                notes=tuple(data.get("notes", [])),
                enforce_fidelity=data.get("enforce_fidelity"),
            )
        except (KeyError, TypeError) as e:
            raise SpecError(f"Malformed generator spec: {e}")
        spec.validate()
        return spec


def repair_correlation(matrix: np.ndarray, floor: float = EIGEN_FLOOR) -> np.ndarray:
    """Nearest-ish PSD correlation matrix by eigenvalue clipping and diagonal renormalisation"""
    matrix = (matrix + matrix.T) / 2.0
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    if eigenvalues.min() >= floor:
        return matrix
    logger.warning(
        f"Correlation matrix not positive definite (min eigenvalue {eigenvalues.min():.3e}), repairing"
    )
    clipped = eigenvectors @ np.diag(np.maximum(eigenvalues, floor)) @ eigenvectors.T
    scale = 1.0 / np.sqrt(np.diag(clipped))
    repaired = clipped * np.outer(scale, scale)
    np.fill_diagonal(repaired, 1.0)
    return repaired


def _orthonormal_basis(columns: List[np.ndarray]) -> np.ndarray:
    u, s, _ = np.linalg.svd(np.column_stack(columns), full_matrices=False)
    return u[:, s > s.max() * 1e-10]


def _whitened_normals(rng: np.random.Generator, n: int, d: int, basis: np.ndarray) -> np.ndarray:
    z = rng.standard_normal((n, d))
    z = z - basis @ (basis.T @ z)
    cov = z.T @ z / n
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        raise SpecError("Too few rows to whiten the latent normals")
    return np.linalg.solve(chol, z.T).T


@dataclass
class _Layout:
    """Per-table arrays shared by every attempt"""

    mean: np.ndarray
    std: np.ndarray
    slope: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    centred_year: np.ndarray
    offsets: np.ndarray
    target: np.ndarray
    pairs: List[Tuple[int, int]] = field(default_factory=list)
    trended: List[int] = field(default_factory=list)


def _realize(z: np.ndarray, layout: _Layout, corr_scale: np.ndarray, slope_scale: np.ndarray) -> np.ndarray:
    n, d = z.shape
    slopes = layout.slope * slope_scale
    deterministic = slopes * layout.centred_year[:, None] + layout.offsets
    det_cov = deterministic.T @ deterministic / n
    noise_sd = np.sqrt(np.maximum(layout.std**2 - np.diag(det_cov), 0.0))

    latent = np.eye(d)
    for i, j in layout.pairs:
        if noise_sd[i] > 0 and noise_sd[j] > 0:
            wanted = layout.target[i, j] * corr_scale[i, j] * layout.std[i] * layout.std[j]
            value = (wanted - det_cov[i, j]) / (noise_sd[i] * noise_sd[j])
            latent[i, j] = latent[j, i] = float(np.clip(value, -0.999, 0.999))
    try:
        chol = np.linalg.cholesky(repair_correlation(latent))
    except np.linalg.LinAlgError:
        raise SpecError("Correlation matrix is not positive semi-definite after repair")

    values = layout.mean + deterministic + (z @ chol.T) * noise_sd
    return np.clip(values, layout.lo, layout.hi)


def _realized_slopes(values: np.ndarray, centred_year: np.ndarray) -> np.ndarray:
    denom = float(centred_year @ centred_year)
    if denom == 0.0:
        return np.zeros(values.shape[1])
    return centred_year @ (values - values.mean(axis=0)) / denom


def _gaps(values: np.ndarray, layout: _Layout) -> Tuple[Dict, Dict]:
    corr_gaps = {
        (i, j): float(np.corrcoef(values[:, i], values[:, j])[0, 1]) - layout.target[i, j]
        for i, j in layout.pairs
    }
    slopes = _realized_slopes(values, layout.centred_year)
    slope_gaps = {
        i: (slopes[i] - layout.slope[i]) / abs(layout.slope[i]) for i in layout.trended
    }
    return corr_gaps, slope_gaps


def _build_layout(spec: GeneratorSpec, keys: pd.DataFrame) -> _Layout:
    n = len(keys)
    d = len(spec.columns)
    if "year" in keys:
        year = keys["year"].to_numpy(dtype=float)
        centred_year = year - year.mean()
    else:
        centred_year = np.zeros(n)

    offsets = np.zeros((n, d))
    for i, column in enumerate(spec.columns):
        if column.group_means:
            raw = keys[spec.entities.group_column].map(column.group_means).to_numpy(dtype=float)
            offsets[:, i] = raw - raw.mean()

    layout = _Layout(
        mean=np.array([c.target_mean for c in spec.columns]),
        std=np.array([c.target_std for c in spec.columns]),
        slope=np.array([c.slope for c in spec.columns]),
        lo=np.array([c.lo for c in spec.columns]),
        hi=np.array([c.hi for c in spec.columns]),
        centred_year=centred_year,
        offsets=offsets,
        target=spec.correlation_matrix(),
    )
    index = {name: i for i, name in enumerate(spec.column_names)}
    layout.pairs = [tuple(sorted((index[t.a], index[t.b]))) for t in spec.correlations]
    layout.trended = [i for i, c in enumerate(spec.columns) if c.slope != 0 and np.any(centred_year)]

    deterministic = layout.slope * centred_year[:, None] + offsets
    explained = np.mean(deterministic**2, axis=0)
    for i, column in enumerate(spec.columns):
        if explained[i] > layout.std[i] ** 2 * (1 + 1e-9) + 1e-12:
            raise SpecError(
                f"Column '{column.name}': trend and group offsets exceed its target std"
            )
    return layout


def generate(spec: GeneratorSpec) -> DataTable:
    """Sample one table; identical spec and seed give bit-identical output"""
    spec.validate()
    keys = spec.entities.build_frame()
    n, d = len(keys), len(spec.columns)
    layout = _build_layout(spec, keys)

    basis_columns = [np.ones(n)]
    if np.any(layout.centred_year):
        basis_columns.append(layout.centred_year)
    if spec.entities.group_column is not None and any(c.group_means for c in spec.columns):
        group = keys[spec.entities.group_column]
        basis_columns.extend((group == g).to_numpy(dtype=float) for g in spec.entities.groups)
    basis = _orthonormal_basis(basis_columns)

    enforce = spec.enforce_fidelity if spec.enforce_fidelity is not None else n >= FIDELITY_MIN_ROWS
    logger.info(f"Starting generation of '{spec.name}' ({n} rows, seed {spec.seed})")

    for attempt in range(MAX_ATTEMPTS):
        rng = np.random.default_rng([int(spec.seed), attempt])
        z = _whitened_normals(rng, n, d, basis)
        corr_scale = np.ones((d, d))
        slope_scale = np.ones(d)

        values = _realize(z, layout, corr_scale, slope_scale)
        corr_gaps, slope_gaps = _gaps(values, layout)
        for _ in range(MAX_CALIBRATION_PASSES):
            settled = all(abs(g) <= 0.005 for g in corr_gaps.values()) and all(
                abs(g) <= 0.01 for g in slope_gaps.values()
            )
            if settled:
                break
            for (i, j), gap in corr_gaps.items():
                realized = layout.target[i, j] + gap
                if layout.target[i, j] != 0 and realized * layout.target[i, j] > 0:
                    ratio = corr_scale[i, j] * layout.target[i, j] / realized
                    corr_scale[i, j] = corr_scale[j, i] = float(np.clip(ratio, *CORRELATION_STRETCH))
            for i, gap in slope_gaps.items():
                if gap > -1.0:
                    slope_scale[i] = float(np.clip(slope_scale[i] / (1.0 + gap), *SLOPE_STRETCH))
            values = _realize(z, layout, corr_scale, slope_scale)
            corr_gaps, slope_gaps = _gaps(values, layout)

        faithful = all(abs(g) <= CORRELATION_TOLERANCE for g in corr_gaps.values()) and all(
            abs(g) <= SLOPE_TOLERANCE for g in slope_gaps.values()
        )
        if faithful or not enforce:
            return _to_table(spec, keys, values)
        logger.warning(f"Attempt {attempt + 1} for '{spec.name}' missed fidelity targets, retrying")

    raise SpecError(
        f"Could not realize '{spec.name}' within tolerance after {MAX_ATTEMPTS} attempts"
    )


def _to_table(spec: GeneratorSpec, keys: pd.DataFrame, values: np.ndarray) -> DataTable:
    frame = keys.copy()
    for i, name in enumerate(spec.column_names):
        frame[name] = values[:, i]

    kinds = {c: CATEGORICAL for c in keys.columns}
    if "year" in keys:
        kinds["year"] = NUMERIC
    kinds.update({name: NUMERIC for name in spec.column_names})

    notes = list(spec.notes)
    for column in spec.columns:
        if column.mean is None:
            notes.append(f"{column.name}: mean defaulted to range midpoint {column.target_mean:.6g}")
        if column.std is None:
            notes.append(f"{column.name}: std defaulted to range/6 = {column.target_std:.6g}")

    logger.info(f"Successfully generated '{spec.name}' with {len(frame)} rows")
    return DataTable(
        name=spec.name,
        frame=frame,
        kinds=kinds,
        key_columns=tuple(keys.columns),
        notes=notes,
    )


def inject_missing(t: DataTable, fraction: float, seed: int) -> DataTable:
    """Blank exactly round(fraction * cells) numeric value cells, chosen uniformly"""
    if not 0.0 <= fraction <= MAX_MISSING_FRACTION:
        raise ContractError(f"Missing fraction must be in [0, {MAX_MISSING_FRACTION}], got {fraction}")
    columns = t.value_columns
    cells = len(t.frame) * len(columns)
    count = int(np.floor(fraction * cells + 0.5))
    if count == 0:
        return t.copy()

    rng = np.random.default_rng(int(seed))
    chosen = np.sort(rng.choice(cells, size=count, replace=False))
    rows, cols = np.divmod(chosen, len(columns))
    block = t.frame[columns].to_numpy(dtype=float)
    block[rows, cols] = np.nan

    frame = t.frame.copy()
    for k, column in enumerate(columns):
        frame[column] = block[:, k]
    logger.info(f"Injected {count} missing cells into '{t.name}'")
    out = t.with_frame(frame)
    out.notes.append(f"{count} numeric cells blanked at fraction {fraction}")
    return out


def realized_statistics(t: DataTable, spec: GeneratorSpec) -> Dict:
    """Target vs realized moments, slopes and correlations for the manifest"""
    frame = t.frame
    columns = {}
    for column in spec.columns:
        series = frame[column.name]
        entry = {
            "target_mean": column.target_mean,
            "mean": float(series.mean()),
            "target_std": column.target_std,
            "std": float(series.std(ddof=0)),
            "min": float(series.min()),
            "max": float(series.max()),
        }
        if column.slope != 0 and "year" in frame:
            entry["target_slope"] = column.slope
            entry["slope"] = trend_slope(frame["year"].to_numpy(float), series.to_numpy(float))
        columns[column.name] = entry

    correlations = []
    for target in spec.correlations:
        a = frame[target.a].to_numpy(float)
        b = frame[target.b].to_numpy(float)
        keep = ~(np.isnan(a) | np.isnan(b))
        correlations.append(
            {
                "a": target.a,
                "b": target.b,
                "target": target.r,
                "realized": pearson_r(a[keep], b[keep]),
            }
        )
    return {"name": spec.name, "rows": t.n_rows, "columns": columns, "correlations": correlations}

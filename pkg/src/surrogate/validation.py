import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.datagen.data_table import NUMERIC, DataTable
from src.exceptions import ContractError
from src.preprocessing.preprocessing_pipeline import (
    FittedPipeline,
    PipelineConfig,
    PreprocessingPipeline,
)
from src.surrogate.ensembles import TreeEnsemble, fit_boosting, fit_forest
from src.surrogate.linear import fit_linear
from src.surrogate.trees import check_training_data

logger = logging.getLogger(__name__)

MODEL_KINDS = ("linear", "forest", "boosting", "framework")


@dataclass(frozen=True)
class RegressionMetrics:
    r2: float
    mse: float
    mae: float
    rmse: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def regression_metrics(y_true, y_pred) -> RegressionMetrics:
    y_true = np.asarray(y_true, dtype=float)
    y_pred = np.asarray(y_pred, dtype=float)
    if y_true.shape != y_pred.shape or y_true.size == 0:
        raise ContractError("y_true and y_pred must be non-empty and equally shaped")
    residual = y_true - y_pred
    sse = float(residual @ residual)
    sst = float(np.sum((y_true - y_true.mean()) ** 2))
    if sst == 0.0:
        r2 = 1.0 if sse == 0.0 else 0.0
    else:
        r2 = 1.0 - sse / sst
    mse = sse / y_true.size
    return RegressionMetrics(
        r2=r2,
        mse=mse,
        mae=float(np.mean(np.abs(residual))),
        rmse=math.sqrt(mse),
    )


class FrameworkModel:
    """z-scored features plus engineered interactions, fed to gradient boosting"""

    def __init__(self, pipeline: FittedPipeline, ensemble: TreeEnsemble, feature_names: List[str]):
        self.pipeline = pipeline
        self.ensemble = ensemble
        self.feature_names = feature_names

    @staticmethod
    def as_table(X: np.ndarray, feature_names: Sequence[str]) -> DataTable:
        frame = pd.DataFrame(np.asarray(X, dtype=float), columns=list(feature_names))
        return DataTable(
            name="features", frame=frame, kinds={c: NUMERIC for c in feature_names}
        )

    def engineered(self, X) -> np.ndarray:
        table = PreprocessingPipeline.transform(self.pipeline, self.as_table(X, self.feature_names))
        return table.frame.to_numpy(dtype=float)

    def predict(self, X) -> np.ndarray:
        return self.ensemble.predict(self.engineered(X))

    @property
    def engineered_names(self) -> List[str]:
        return list(self.pipeline.columns) + [f"{a}_x_{b}" for a, b in self.pipeline.interactions]

    @property
    def feature_importance(self) -> Tuple[float, ...]:
        return self.ensemble.feature_importance


@dataclass(frozen=True)
class ModelSpec:
    name: str
    kind: str
    params: Dict = field(default_factory=dict)
    interactions: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ContractError(f"Unknown model kind '{self.kind}'")

    def fit(self, X, y, feature_names: Optional[Sequence[str]] = None, seed: int = 42, threads: int = 1):
        if self.kind == "linear":
            return fit_linear(X, y)
        if self.kind == "forest":
            return fit_forest(X, y, seed=seed, threads=threads, **self.params)
        if self.kind == "boosting":
            return fit_boosting(X, y, seed=seed, **self.params)

        X, y = check_training_data(X, y)
        names = list(feature_names or [f"x{i}" for i in range(X.shape[1])])
        config = PipelineConfig(
            impute=True,
            scale=True,
            outlier_action="none",
            interaction_pairs=tuple(self.interactions),
        )
        pipeline = PreprocessingPipeline(config).fit(FrameworkModel.as_table(X, names))
        model = FrameworkModel(pipeline, None, names)
        model.ensemble = fit_boosting(model.engineered(X), y, seed=seed, **self.params)
        return model


@dataclass
class CrossValidationResult:
    model: str
    fold_metrics: List[RegressionMetrics]
    mean: RegressionMetrics
    std: RegressionMetrics
    oof_predictions: np.ndarray
    fold_sizes: List[int]

    def to_records(self) -> List[Dict]:
        rows = [
            {"model": self.model, "fold": str(i + 1), **m.to_dict()}
            for i, m in enumerate(self.fold_metrics)
        ]
        rows.append({"model": self.model, "fold": "mean", **self.mean.to_dict()})
        rows.append({"model": self.model, "fold": "std", **self.std.to_dict()})
        return rows


def fold_indices(n: int, k: int, seed: int) -> List[np.ndarray]:
    """Seeded shuffle cut into k contiguous folds whose sizes differ by at most one"""
    if k < 2:
        raise ContractError(f"k must be >= 2, got {k}")
    if k > n:
        raise ContractError(f"k={k} exceeds the number of rows {n}")
    order = np.random.default_rng(seed).permutation(n)
    sizes = [n // k + (1 if i < n % k else 0) for i in range(k)]
    bounds = np.cumsum([0] + sizes)
    return [order[bounds[i]:bounds[i + 1]] for i in range(k)]


def _summarise(fold_metrics: List[RegressionMetrics]) -> Tuple[RegressionMetrics, RegressionMetrics]:
    table = np.array([[m.r2, m.mse, m.mae, m.rmse] for m in fold_metrics])
    means = table.mean(axis=0)
    stds = table.std(axis=0, ddof=1) if len(fold_metrics) > 1 else np.zeros(4)
    return RegressionMetrics(*map(float, means)), RegressionMetrics(*map(float, stds))


def cross_validate(
    spec: ModelSpec,
    X,
    y,
    k: int = 5,
    seed: int = 42,
    feature_names: Optional[Sequence[str]] = None,
    threads: int = 1,
) -> CrossValidationResult:
    X, y = check_training_data(X, y)
    folds = fold_indices(y.size, k, seed)
    oof = np.empty(y.size)
    fold_metrics = []
    logger.info(f"Starting {k}-fold cross-validation of {spec.name}")
    for i, test in enumerate(folds):
        train = np.setdiff1d(np.arange(y.size), test, assume_unique=True)
        model = spec.fit(X[train], y[train], feature_names=feature_names, seed=seed + i, threads=threads)
        predictions = model.predict(X[test])
        oof[test] = predictions
        fold_metrics.append(regression_metrics(y[test], predictions))
    mean, std = _summarise(fold_metrics)
    logger.info(f"Successfully validated {spec.name}: mean R2 {mean.r2:.4f}")
    return CrossValidationResult(
        model=spec.name,
        fold_metrics=fold_metrics,
        mean=mean,
        std=std,
        oof_predictions=oof,
        fold_sizes=[f.size for f in folds],
    )


def holdout_split(n: int, test_fraction: float = 0.2, seed: int = 42) -> Tuple[np.ndarray, np.ndarray]:
    if not 0.0 < test_fraction < 1.0:
        raise ContractError(f"test_fraction must be in (0, 1), got {test_fraction}")
    n_test = int(round(n * test_fraction))
    if n_test < 1 or n_test >= n:
        raise ContractError(f"Holdout of {test_fraction} leaves an empty split for n={n}")
    order = np.random.default_rng(seed).permutation(n)
    return np.sort(order[n_test:]), np.sort(order[:n_test])


def default_model_specs(interactions: Sequence[Tuple[str, str]] = ()) -> List[ModelSpec]:
    return [
        ModelSpec("Linear Regression", "linear"),
        ModelSpec("Random Forest", "forest"),
        ModelSpec("Gradient Boosting", "boosting"),
        ModelSpec("EcoAI Framework", "framework", interactions=tuple(interactions)),
    ]

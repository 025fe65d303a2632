from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from src.exceptions import ContractError, SingularDesignError
from src.surrogate.trees import check_training_data

RANK_TOLERANCE = 1e-10


@dataclass(frozen=True)
class LinearModel:
    coef: Tuple[float, ...]
    intercept: float

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return X @ np.asarray(self.coef) + self.intercept

    def to_dict(self) -> Dict:
        return {"coef": list(self.coef), "intercept": self.intercept}


def fit_linear(X, y) -> LinearModel:
    """Ordinary least squares through a QR factorisation of [1, X]"""
    X, y = check_training_data(X, y)
    n, d = X.shape
    if n <= d:
        raise ContractError(f"Need more rows than features, got n={n}, d={d}")
    design = np.column_stack([np.ones(n), X])
    q, r = np.linalg.qr(design)
    diagonal = np.abs(np.diag(r))
    tolerance = RANK_TOLERANCE * diagonal.max()
    if np.any(diagonal <= tolerance):
        raise SingularDesignError("Design matrix is rank deficient")
    beta = np.linalg.solve(r, q.T @ y)
    return LinearModel(coef=tuple(float(b) for b in beta[1:]), intercept=float(beta[0]))

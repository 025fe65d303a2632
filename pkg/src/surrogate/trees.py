"""CART regression trees grown by greedy variance reduction."""

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from src.exceptions import ContractError


@dataclass(frozen=True)
class TreeNode:
    """Leaf when ``feature`` is -1; rows with x[feature] <= threshold go left"""

    value: float
    n_samples: int
    feature: int = -1
    threshold: float = float("nan")
    gain: float = 0.0
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0

    def to_dict(self) -> Dict:
        if self.is_leaf:
            return {"value": self.value, "n_samples": self.n_samples}
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "gain": self.gain,
            "value": self.value,
            "n_samples": self.n_samples,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "TreeNode":
        if "feature" not in data:
            return cls(value=float(data["value"]), n_samples=int(data["n_samples"]))
        return cls(
            value=float(data["value"]),
            n_samples=int(data["n_samples"]),
            feature=int(data["feature"]),
            threshold=float(data["threshold"]),
            gain=float(data["gain"]),
            left=cls.from_dict(data["left"]),
            right=cls.from_dict(data["right"]),
        )


def check_training_data(X, y) -> Tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
        raise ContractError(f"X must be a non-empty 2-d matrix, got shape {X.shape}")
    if y.shape != (X.shape[0],):
        raise ContractError(f"y must have {X.shape[0]} entries, got shape {y.shape}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ContractError("Training data contains missing or non-finite values")
    return X, y


def best_split(
    X: np.ndarray, y: np.ndarray, features: np.ndarray, min_samples_leaf: int
) -> Optional[Tuple[int, float, float, int]]:
    """(feature, threshold, gain, n_left) of the best split, or None.

    Candidate thresholds are midpoints between consecutive distinct values.
    Equal gains resolve to the lower feature index, then the lower threshold.
    """
    n = y.size
    centred = y - y.mean()
    columns = X[:, features]
    order = np.argsort(columns, axis=0, kind="mergesort")
    xs = np.take_along_axis(columns, order, axis=0)
    left_sum = np.cumsum(centred[order], axis=0)[:-1]

    n_left = np.arange(1, n, dtype=float)[:, None]
    gains = left_sum**2 * n / (n_left * (n - n_left))
    valid = (xs[1:] > xs[:-1]) & (n_left >= min_samples_leaf) & (n - n_left >= min_samples_leaf)
    gains = np.where(valid, gains, -np.inf)

    best = gains.max()
    if not np.isfinite(best):
        return None
    # transpose so the first hit is the lowest feature, then the lowest threshold
    column, position = np.argwhere(gains.T == best)[0]
    threshold = (xs[position, column] + xs[position + 1, column]) / 2.0
    return int(features[column]), float(threshold), float(best), int(position + 1)


def fit_tree(
    X,
    y,
    max_depth: int = 10,
    min_samples_leaf: int = 2,
    feature_subset: Optional[int] = None,
    seed: int = 0,
) -> TreeNode:
    X, y = check_training_data(X, y)
    if max_depth < 0:
        raise ContractError(f"max_depth must be >= 0, got {max_depth}")
    if min_samples_leaf < 1:
        raise ContractError(f"min_samples_leaf must be >= 1, got {min_samples_leaf}")
    n_features = X.shape[1]
    if feature_subset is not None and not 1 <= feature_subset <= n_features:
        raise ContractError(f"feature_subset must be in [1, {n_features}], got {feature_subset}")
    rng = np.random.default_rng(seed)
    all_features = np.arange(n_features)

    def grow(rows: np.ndarray, depth: int) -> TreeNode:
        target = y[rows]
        node_value = float(target.mean())
        leaf = TreeNode(value=node_value, n_samples=int(rows.size))
        if depth >= max_depth or rows.size < 2 * min_samples_leaf or np.ptp(target) == 0.0:
            return leaf
        if feature_subset is None or feature_subset == n_features:
            features = all_features
        else:
            features = np.sort(rng.choice(n_features, size=feature_subset, replace=False))
        split = best_split(X[rows], target, features, min_samples_leaf)
        if split is None:
            return leaf
        feature, threshold, gain, _ = split
        sst = float(np.sum((target - node_value) ** 2))
        if gain <= 1e-12 * sst:
            return leaf
        goes_left = X[rows, feature] <= threshold
        return TreeNode(
            value=node_value,
            n_samples=int(rows.size),
            feature=feature,
            threshold=threshold,
            gain=gain,
            left=grow(rows[goes_left], depth + 1),
            right=grow(rows[~goes_left], depth + 1),
        )

    return grow(np.arange(y.size), 0)


def predict_tree(node: TreeNode, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    out = np.empty(X.shape[0])
    stack = [(node, np.arange(X.shape[0]))]
    while stack:
        current, rows = stack.pop()
        if current.is_leaf:
            out[rows] = current.value
            continue
        goes_left = X[rows, current.feature] <= current.threshold
        stack.append((current.left, rows[goes_left]))
        stack.append((current.right, rows[~goes_left]))
    return out


def accumulate_importance(node: TreeNode, totals: np.ndarray) -> None:
    """Add each split's weighted SSE reduction to its feature's total"""
    stack = [node]
    while stack:
        current = stack.pop()
        if not current.is_leaf:
            totals[current.feature] += current.gain
            stack.extend((current.left, current.right))


def normalized_importance(totals: np.ndarray) -> np.ndarray:
    total = float(totals.sum())
    if total <= 0.0 or not math.isfinite(total):
        return np.zeros_like(totals)
    return totals / total

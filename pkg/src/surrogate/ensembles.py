import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from src.exceptions import ContractError
from src.surrogate.trees import (
    TreeNode,
    accumulate_importance,
    check_training_data,
    fit_tree,
    normalized_importance,
    predict_tree,
)

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1


def splitmix64(state: int) -> Tuple[int, int]:
    """One step of splitmix64: returns (next_state, output)"""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def derived_seeds(seed: int, count: int) -> List[int]:
    state = int(seed) & MASK64
    seeds = []
    for _ in range(count):
        state, value = splitmix64(state)
        seeds.append(value)
    return seeds


@dataclass(frozen=True)
class TreeEnsemble:
    kind: str
    trees: Tuple[TreeNode, ...]
    feature_importance: Tuple[float, ...]
    seed: int
    learning_rate: float = 1.0
    base_prediction: float = 0.0

    def tree_predictions(self, X) -> np.ndarray:
        """Matrix of per-tree outputs, one column per tree"""
        X = np.asarray(X, dtype=float)
        return np.column_stack([predict_tree(tree, X) for tree in self.trees])

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if self.kind == "forest":
            return self.tree_predictions(X).mean(axis=1)
        out = np.full(X.shape[0], self.base_prediction)
        for tree in self.trees:
            out += self.learning_rate * predict_tree(tree, X)
        return out

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind,
            "seed": self.seed,
            "learning_rate": self.learning_rate,
            "base_prediction": self.base_prediction,
            "feature_importance": list(self.feature_importance),
            "trees": [tree.to_dict() for tree in self.trees],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "TreeEnsemble":
        return cls(
            kind=data["kind"],
            trees=tuple(TreeNode.from_dict(t) for t in data["trees"]),
            feature_importance=tuple(float(v) for v in data["feature_importance"]),
            seed=int(data["seed"]),
            learning_rate=float(data["learning_rate"]),
            base_prediction=float(data["base_prediction"]),
        )


def fit_forest(
    X,
    y,
    n_trees: int = 100,
    max_depth: int = 10,
    min_samples_leaf: int = 2,
    seed: int = 42,
    threads: int = 1,
) -> TreeEnsemble:
    """Bagged CART trees with ceil(d/3) candidate features per split"""
    X, y = check_training_data(X, y)
    if n_trees < 1:
        raise ContractError(f"n_trees must be >= 1, got {n_trees}")
    n, d = X.shape
    subset = max(1, math.ceil(d / 3))
    seeds = derived_seeds(seed, 2 * n_trees)

    def grow(k: int) -> TreeNode:
        rows = np.random.default_rng(seeds[2 * k]).integers(0, n, size=n)
        return fit_tree(
            X[rows],
            y[rows],
            max_depth=max_depth,
            min_samples_leaf=min_samples_leaf,
            feature_subset=subset,
            seed=seeds[2 * k + 1],
        )

    logger.debug(f"Fitting forest of {n_trees} trees on {n} rows")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trees = list(pool.map(grow, range(n_trees)))
    else:
        trees = [grow(k) for k in range(n_trees)]

    totals = np.zeros(d)
    for tree in trees:
        accumulate_importance(tree, totals)
    return TreeEnsemble(
        kind="forest",
        trees=tuple(trees),
        feature_importance=tuple(normalized_importance(totals)),
        seed=int(seed),
    )


def fit_boosting(
    X,
    y,
    n_trees: int = 100,
    learning_rate: float = 0.1,
    max_depth: int = 6,
    min_samples_leaf: int = 5,
    seed: int = 42,
) -> TreeEnsemble:
    """Stagewise least-squares boosting starting from the target mean"""
    X, y = check_training_data(X, y)
    if n_trees < 1:
        raise ContractError(f"n_trees must be >= 1, got {n_trees}")
    if not 0.0 <= learning_rate <= 1.0:
        raise ContractError(f"learning_rate must be in [0, 1], got {learning_rate}")
    base = float(y.mean())
    fitted = np.full(y.size, base)
    seeds = derived_seeds(seed, n_trees)
    totals = np.zeros(X.shape[1])
    trees = []
    for k in range(n_trees):
        tree = fit_tree(
            X,
            y - fitted,
            max_depth=max_depth,
            min_samples_leaf=min_samples_leaf,
            seed=seeds[k],
        )
        fitted = fitted + learning_rate * predict_tree(tree, X)
        accumulate_importance(tree, totals)
        trees.append(tree)
    logger.debug(f"Fitted {n_trees} boosting stages on {y.size} rows")
    return TreeEnsemble(
        kind="boosting",
        trees=tuple(trees),
        feature_importance=tuple(normalized_importance(totals)),
        seed=int(seed),
        learning_rate=float(learning_rate),
        base_prediction=base,
    )

"""Independent optimizers used to cross-check the SQP solver."""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Tuple

import numpy as np

from src.exceptions import ContractError, OracleInapplicableError
from src.model.domain import VARIABLES, BoundsSet, ModelCoefficients, WeightConfig
from src.model.objective import gradient_values, objective_values
from src.optimization.solver import (
    OptimizationResult,
    build_result,
    preferred_directions,
    projected_gradient,
)

logger = logging.getLogger(__name__)

MIN_GRID_POINTS = 2
MAX_GRID_POINTS = 6
DEFAULT_CHUNK_SIZE = 250_000


def _kkt_residual(x: np.ndarray, w: WeightConfig, c: ModelCoefficients, b: BoundsSet) -> float:
    span = b.span
    u = (x - b.lower) / span
    u = np.where(x <= b.lower, 0.0, np.where(x >= b.upper, 1.0, u))
    g = -gradient_values(x, w, c) * span
    return float(np.max(np.abs(projected_gradient(u, g))))


def corner_oracle(w: WeightConfig, c: ModelCoefficients, b: BoundsSet) -> OptimizationResult:
    """Pick each variable's bound from the sign of its partial derivative.

    Signs are sampled on the 3^9 grid of (lower, midpoint, upper) levels; a
    variable whose partial takes both signs makes the corner argument invalid.
    """
    if w.strict:
        w.validate()
    levels = np.column_stack([b.lower, (b.lower + b.upper) / 2.0, b.upper])
    samples = np.array(list(itertools.product(*levels)), dtype=float)
    signs = np.sign(gradient_values(samples, w, c))

    preferred = preferred_directions()
    corner = np.empty(len(VARIABLES))
    for i, name in enumerate(VARIABLES):
        rising = bool(np.any(signs[:, i] > 0))
        falling = bool(np.any(signs[:, i] < 0))
        if rising and falling:
            raise OracleInapplicableError(
                f"Partial derivative of {name} changes sign over the box"
            )
        if rising:
            corner[i] = b.upper[i]
        elif falling:
            corner[i] = b.lower[i]
        else:
            corner[i] = b.upper[i] if preferred[i] > 0 else b.lower[i]

    return build_result(
        corner,
        w,
        c,
        method="corner-oracle",
        iterations=0,
        converged=True,
        kkt_residual=_kkt_residual(corner, w, c, b),
    )


def _grid_points(levels: np.ndarray, start: int, stop: int) -> np.ndarray:
    """Grid rows for flat indices [start, stop); the first variable is most significant"""
    p = levels.shape[1]
    index = np.arange(start, stop, dtype=np.int64)
    points = np.empty((index.size, levels.shape[0]))
    for j in range(levels.shape[0] - 1, -1, -1):
        points[:, j] = levels[j, index % p]
        index = index // p
    return points


def grid_oracle(
    w: WeightConfig,
    c: ModelCoefficients,
    b: BoundsSet,
    points_per_dim: int,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> OptimizationResult:
    """Exhaustive search on a uniform grid including both bounds of every variable.

    Ties resolve to the lowest flat grid index, so the answer does not depend
    on how the grid is split across threads.
    """
    if not (MIN_GRID_POINTS <= int(points_per_dim) <= MAX_GRID_POINTS):
        raise ContractError(
            f"points_per_dim must be in [{MIN_GRID_POINTS}, {MAX_GRID_POINTS}], "
            f"got {points_per_dim}"
        )
    if w.strict:
        w.validate()
    p = int(points_per_dim)
    levels = np.linspace(b.lower, b.upper, p).T
    total = p ** len(VARIABLES)
    chunks: List[Tuple[int, int]] = [
        (start, min(start + chunk_size, total)) for start in range(0, total, chunk_size)
    ]

    def best_in_chunk(bounds: Tuple[int, int]) -> Tuple[float, int]:
        start, stop = bounds
        values = objective_values(_grid_points(levels, start, stop), w, c)
        k = int(np.argmax(values))
        return float(values[k]), start + k

    logger.info(f"Evaluating {total} grid points in {len(chunks)} chunks")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            winners = list(pool.map(best_in_chunk, chunks))
    else:
        winners = [best_in_chunk(chunk) for chunk in chunks]

    best_value, best_index = winners[0]
    for value, index in winners[1:]:
        if value > best_value:
            best_value, best_index = value, index

    x = _grid_points(levels, best_index, best_index + 1)[0]
    return build_result(
        x,
        w,
        c,
        method="grid-oracle",
        iterations=0,
        converged=True,
        kkt_residual=_kkt_residual(x, w, c, b),
    )

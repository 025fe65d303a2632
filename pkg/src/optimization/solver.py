"""Box-constrained SQP maximizer.

Every constraint of the deployment problem is a simple bound, so the QP
subproblem of each SQP iteration reduces to a projected quasi-Newton step on
the free variables. The search runs in unit-box coordinates so that variables
whose ranges differ by orders of magnitude take comparable steps.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from src.exceptions import ContractError
from src.model.domain import (
    BENEFIT_VARIABLES,
    VARIABLES,
    BoundsSet,
    DeploymentStrategy,
    ModelCoefficients,
    WeightConfig,
)
from src.model.objective import (
    component_scores,
    composite_objective,
    gradient_values,
    objective_values,
)

logger = logging.getLogger(__name__)

ARMIJO_C1 = 1e-4
BACKTRACK_SHRINK = 0.5
MAX_BACKTRACKS = 60


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 500
    tolerance: float = 1e-8
    initial_strategy: DeploymentStrategy = field(default_factory=DeploymentStrategy.initial)

    def __post_init__(self):
        if int(self.max_iterations) < 1:
            raise ContractError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not (self.tolerance > 0):
            raise ContractError(f"tolerance must be > 0, got {self.tolerance}")


@dataclass(frozen=True)
class BoxSolution:
    x: np.ndarray
    value: float
    iterations: int
    converged: bool
    kkt_residual: float
    history: Tuple[float, ...]


@dataclass(frozen=True)
class OptimizationResult:
    optimum: DeploymentStrategy
    objective_value: float
    component_scores: Tuple[float, float, float]
    iterations: int
    converged: bool
    kkt_residual: float
    method: str = "sqp"
    initial_objective: float = float("nan")
    objective_history: Tuple[float, ...] = ()

    @property
    def improved(self) -> bool:
        """Validation step: the optimum must not be worse than the start"""
        if math.isnan(self.initial_objective):
            return True
        return self.objective_value >= self.initial_objective

    def to_dict(self) -> Dict:
        sustainability, resilience, environmental = self.component_scores
        return {
            "method": self.method,
            "optimum": self.optimum.to_dict(),
            "objective_value": self.objective_value,
            "component_scores": {
                "sustainability": sustainability,
                "resilience": resilience,
                "environmental": environmental,
            },
            "iterations": self.iterations,
            "converged": self.converged,
            "kkt_residual": self.kkt_residual,
            "initial_objective": None
            if math.isnan(self.initial_objective)
            else self.initial_objective,
            "improved": self.improved,
        }


def projected_gradient(u: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Gradient of a minimization problem on [0, 1]^n with blocked components zeroed"""
    blocked = ((u <= 0.0) & (g > 0.0)) | ((u >= 1.0) & (g < 0.0))
    return np.where(blocked, 0.0, g)


def _scaled_identity(g: np.ndarray) -> np.ndarray:
    scale = float(np.linalg.norm(g))
    if not math.isfinite(scale) or scale <= 0.0:
        scale = 1.0
    return scale * np.eye(g.size)


def _newton_direction(B: np.ndarray, g: np.ndarray, free: np.ndarray) -> Optional[np.ndarray]:
    d = np.zeros_like(g)
    if not np.any(free):
        return d
    try:
        d[free] = np.linalg.solve(B[np.ix_(free, free)], -g[free])
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(d)):
        return None
    return d


def maximize_box(
    fun: Callable[[np.ndarray], float],
    grad: Callable[[np.ndarray], np.ndarray],
    lower: Sequence[float],
    upper: Sequence[float],
    x0: Sequence[float],
    max_iterations: int = 500,
    tolerance: float = 1e-8,
    preferred: Optional[Sequence[int]] = None,
) -> BoxSolution:
    """Maximize a smooth function over a box.

    ``preferred`` gives, per variable, the bound to take (+1 upper, -1 lower)
    when its partial derivative is exactly zero at the solution and moving
    there does not lower the objective.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    if np.any(lower >= upper):
        raise ContractError("Every lower bound must be below its upper bound")
    if np.any(x0 < lower) or np.any(x0 > upper):
        raise ContractError("Initial point lies outside the bounds")
    span = upper - lower

    def to_x(u: np.ndarray) -> np.ndarray:
        x = lower + u * span
        return np.where(u <= 0.0, lower, np.where(u >= 1.0, upper, x))

    def f(u: np.ndarray) -> float:
        return -float(fun(to_x(u)))

    def g(u: np.ndarray) -> np.ndarray:
        return -np.asarray(grad(to_x(u)), dtype=float) * span

    u = np.clip((x0 - lower) / span, 0.0, 1.0)
    fu = f(u)
    gu = g(u)
    B = _scaled_identity(gu)
    history = [-fu]
    iterations = 0

    while iterations < max_iterations:
        pg = projected_gradient(u, gu)
        if np.max(np.abs(pg)) <= tolerance:
            break
        free = pg != 0.0

        d = _newton_direction(B, gu, free)
        if d is None or gu @ (np.clip(u + d, 0.0, 1.0) - u) >= 0.0:
            B = _scaled_identity(gu)
            d = _newton_direction(B, gu, free)

        t = 1.0
        accepted = None
        for _ in range(MAX_BACKTRACKS):
            trial = np.clip(u + t * d, 0.0, 1.0)
            predicted = gu @ (trial - u)
            f_trial = f(trial)
            if predicted < 0.0 and f_trial <= fu + ARMIJO_C1 * predicted:
                accepted = (trial, f_trial)
                break
            t *= BACKTRACK_SHRINK
        if accepted is None:
            logger.debug(f"Line search stalled after {iterations} iterations")
            break

        trial, f_trial = accepted
        g_trial = g(trial)
        s = trial - u
        y = g_trial - gu
        sy = float(s @ y)
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y) and sy > 0.0:
            Bs = B @ s
            B = B - np.outer(Bs, Bs) / float(s @ Bs) + np.outer(y, y) / sy
        else:
            # curvature condition failed, restart the quasi-Newton model
            B = _scaled_identity(g_trial)

        u, fu, gu = trial, f_trial, g_trial
        iterations += 1
        history.append(-fu)
        if np.max(np.abs(s)) <= tolerance:
            break

    if preferred is not None:
        for i, direction in enumerate(preferred):
            if direction == 0 or gu[i] != 0.0:
                continue
            target = 1.0 if direction > 0 else 0.0
            if u[i] == target:
                continue
            candidate = u.copy()
            candidate[i] = target
            f_candidate = f(candidate)
            if f_candidate <= fu:
                u, fu, gu = candidate, f_candidate, g(candidate)
                history.append(-fu)

    kkt = float(np.max(np.abs(projected_gradient(u, gu))))
    return BoxSolution(
        x=to_x(u),
        value=-fu,
        iterations=iterations,
        converged=kkt <= tolerance,
        kkt_residual=kkt,
        history=tuple(history),
    )


def preferred_directions() -> np.ndarray:
    """+1 for benefit variables, -1 for environmental cost variables"""
    return np.array([1 if name in BENEFIT_VARIABLES else -1 for name in VARIABLES])


def build_result(
    x: np.ndarray,
    w: WeightConfig,
    c: ModelCoefficients,
    method: str,
    iterations: int,
    converged: bool,
    kkt_residual: float,
    initial_objective: float = float("nan"),
    history: Tuple[float, ...] = (),
) -> OptimizationResult:
    optimum = DeploymentStrategy.from_array(x)
    return OptimizationResult(
        optimum=optimum,
        objective_value=composite_objective(optimum, w, c),
        component_scores=component_scores(optimum, c),
        iterations=iterations,
        converged=converged,
        kkt_residual=kkt_residual,
        method=method,
        initial_objective=initial_objective,
        objective_history=history,
    )


def maximize(
    w: WeightConfig,
    c: ModelCoefficients,
    b: BoundsSet,
    cfg: Optional[SolverConfig] = None,
) -> OptimizationResult:
    cfg = cfg or SolverConfig()
    if w.strict:
        w.validate()
    start = cfg.initial_strategy
    if not b.contains(start):
        raise ContractError(f"Initial strategy outside bounds: {b.violations(start)}")

    logger.info(
        f"Starting SQP maximization for weights "
        f"({w.alpha:.4g}, {w.beta:.4g}, {w.gamma:.4g})"
    )
    solution = maximize_box(
        fun=lambda x: float(objective_values(x, w, c)),
        grad=lambda x: gradient_values(x, w, c),
        lower=b.lower,
        upper=b.upper,
        x0=start.to_array(),
        max_iterations=cfg.max_iterations,
        tolerance=cfg.tolerance,
        preferred=preferred_directions(),
    )
    result = build_result(
        solution.x,
        w,
        c,
        method="sqp",
        iterations=solution.iterations,
        converged=solution.converged,
        kkt_residual=solution.kkt_residual,
        initial_objective=composite_objective(start, w, c),
        history=solution.history,
    )
    if result.converged:
        logger.info(
            f"Successfully converged in {result.iterations} iterations, "
            f"objective {result.objective_value:.6f}"
        )
    else:
        logger.warning(
            f"SQP stopped after {result.iterations} iterations without convergence "
            f"(KKT residual {result.kkt_residual:.3e})"
        )
    return result


def compare_results(
    a: OptimizationResult,
    b: OptimizationResult,
    bounds: BoundsSet,
    objective_tolerance: float = 1e-4,
    coordinate_tolerance: float = 1e-4,
) -> bool:
    """Objective values and optima agree within tolerance (coordinates scaled by range)"""
    if abs(a.objective_value - b.objective_value) >= objective_tolerance:
        return False
    gap = np.abs(a.optimum.to_array() - b.optimum.to_array()) / bounds.span
    return bool(np.all(gap <= coordinate_tolerance))

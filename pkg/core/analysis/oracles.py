"""
Nash equilibrium oracles

EV games have an affine pseudo-gradient and are solved directly. Any game can
be solved by the projected pseudo-gradient fixed-point iteration
x ← P[x - τ∇F(x)] with τ = μ_F / L_F².
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional
import logging

import numpy as np
from scipy import linalg

from ..errors import OracleError
from ..game.constants import monotonicity_constants
from ..game.costs import full_pseudo_gradient
from ..game.spec import ActionProfile, GameKind, GameSpec, project

logger = logging.getLogger(__name__)

FIXED_POINT_TOL = 1e-12
FIXED_POINT_MAX_ITERS = 500_000


class NEMethod(str, Enum):
    AFFINE = "affine"
    FIXED_POINT = "fixed_point"


@dataclass(frozen=True, eq=False)
class NESolution:
    """
    Equilibrium and its quality

    residual is ‖∇F(x⋆)‖, which vanishes only for interior equilibria;
    projected_residual is ‖x⋆ - P[x⋆ - ∇F(x⋆)]‖ and vanishes in every case.
    """
    x_star: ActionProfile
    residual: float
    projected_residual: float
    interior: bool
    method: NEMethod
    iterations: int = 0

    def as_dict(self) -> dict:
        return {
            "method": self.method.value,
            "interior": self.interior,
            "residual": self.residual,
            "projected_residual": self.projected_residual,
            "iterations": self.iterations,
            "x_star": [float(v) for v in self.x_star],
        }

    def format_text(self) -> str:
        lines = [
            f"method = {self.method.value}",
            f"interior = {str(self.interior).lower()}",
            f"residual = {self.residual:.17g}",
            f"projected_residual = {self.projected_residual:.17g}",
            f"iterations = {self.iterations}",
        ]
        lines += [f"x_star.{i + 1} = {v:.17g}" for i, v in enumerate(self.x_star)]
        return "\n".join(lines) + "\n"


def _is_interior(game: GameSpec, x: np.ndarray) -> bool:
    return bool(np.all(x > game.box.lower) and np.all(x < game.box.upper))


def _solution(game: GameSpec, x: np.ndarray, method: NEMethod, iterations: int = 0) -> NESolution:
    grad = full_pseudo_gradient(game, x)
    x = np.array(x, dtype=np.float64)
    x.setflags(write=False)
    return NESolution(
        x_star=x,
        residual=float(np.linalg.norm(grad)),
        projected_residual=float(np.linalg.norm(x - project(x - grad, game.box))),
        interior=_is_interior(game, x),
        method=method,
        iterations=iterations,
    )


def affine_system(game: GameSpec) -> tuple[np.ndarray, np.ndarray]:
    """(M, v) with ∇F(x) = M x - v for an EV game"""
    if game.kind is not GameKind.EV:
        raise OracleError("affine oracle requires an EV game")
    q, d, b = game.params.q, game.params.d, game.params.b
    M = np.diag(q.mean(axis=1)) + game.coupling
    v = (q * d).mean(axis=1) - b.mean(axis=1)
    return M, v


def solve_ne_affine(game: GameSpec) -> NESolution:
    """
    Solve an EV game through its linear system

    Falls back to the fixed-point oracle when the unconstrained solution
    leaves the box.

    Raises:
        OracleError: not an EV game, or singular system
    """
    M, v = affine_system(game)
    try:
        x = linalg.solve(M, v)
    except linalg.LinAlgError as e:
        raise OracleError(f"affine system is singular: {e}") from e

    solution = _solution(game, x, NEMethod.AFFINE)
    if not solution.interior:
        logger.warning("Affine equilibrium lies outside the box; switching to the fixed-point oracle")
        return solve_ne_fixed_point(game)
    logger.info(f"Affine NE solved, residual={solution.residual:.3e}")
    return solution


def solve_ne_fixed_point(
    game: GameSpec,
    tol: float = FIXED_POINT_TOL,
    max_iters: int = FIXED_POINT_MAX_ITERS,
    x0: Optional[ActionProfile] = None,
    seed: int = 0,
) -> NESolution:
    """
    Projected pseudo-gradient iteration with step μ_F / L_F²

    Args:
        game: the game
        tol: stop once ‖x_{t+1} - x_t‖ <= tol
        max_iters: iteration budget
        x0: starting point, box center by default
        seed: sampling seed for the monotonicity estimate

    Returns:
        NESolution

    Raises:
        OracleError: no convergence within max_iters
        MonotonicityViolationError: μ_F <= 0
    """
    muF, lipF = monotonicity_constants(game, seed=seed)
    tau = muF / lipF**2
    x = 0.5 * (game.box.lower + game.box.upper) if x0 is None else project(x0, game.box)

    for iteration in range(1, max_iters + 1):
        x_next = project(x - tau * full_pseudo_gradient(game, x), game.box)
        step = float(np.linalg.norm(x_next - x))
        x = x_next
        if step <= tol:
            solution = _solution(game, x, NEMethod.FIXED_POINT, iteration)
            logger.info(
                f"Fixed-point NE after {iteration} iterations, tau={tau:.4g}, "
                f"residual={solution.residual:.3e}, interior={solution.interior}"
            )
            return solution

    raise OracleError(f"fixed-point oracle did not converge in {max_iters} iterations (last step {step:.3e})")


def solve_ne(game: GameSpec) -> NESolution:
    """Affine oracle for EV games, fixed point otherwise"""
    if game.kind is GameKind.EV:
        return solve_ne_affine(game)
    return solve_ne_fixed_point(game)

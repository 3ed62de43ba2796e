"""
Game constant extraction

μ and L are bounds on the own-curvature of every component over the box, G
bounds every component gradient over the box, μ_F is the strong monotonicity
modulus of ∇F and σ⋆² is the mean squared component gradient at the
equilibrium.
"""

from dataclasses import dataclass, replace
from typing import Tuple
import logging

import numpy as np

from ..errors import MonotonicityViolationError
from .costs import component_grad_table, component_sweep, full_pseudo_gradient, pseudo_jacobian
from .spec import ActionProfile, GameKind, GameSpec

logger = logging.getLogger(__name__)

GRID_POINTS = 1024
MONOTONICITY_PAIRS = 2000
INFLATION = 1.05


@dataclass(frozen=True)
class GameConstants:
    """Constants entering the step-size conditions and the bounds"""
    mu: float
    lip: float
    muF: float
    gbound: float
    sigma_star_sq: float
    kappa_cond: float
    lipF: float = 0.0   # Lipschitz constant of ∇F, used by the fixed-point oracle

    def conservative(self) -> "GameConstants":
        """Constants with the 5% safety inflation applied (bounds up, moduli down)"""
        mu = self.mu / INFLATION
        lip = self.lip * INFLATION
        return replace(
            self,
            mu=mu,
            lip=lip,
            muF=self.muF / INFLATION,
            gbound=self.gbound * INFLATION,
            kappa_cond=lip / mu,
            lipF=self.lipF * INFLATION,
        )

    def as_dict(self) -> dict:
        return {
            "mu": self.mu,
            "lip": self.lip,
            "muF": self.muF,
            "gbound": self.gbound,
            "sigma_star_sq": self.sigma_star_sq,
            "kappa_cond": self.kappa_cond,
            "lipF": self.lipF,
        }


def coupling_extremes(game: GameSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Range of Σ_j C_ij x_j over the box for every player i"""
    low = game.coupling * game.box.lower[None, :]
    high = game.coupling * game.box.upper[None, :]
    return np.minimum(low, high).sum(axis=1), np.maximum(low, high).sum(axis=1)


def _own_grid(game: GameSpec, i: int, points: int) -> np.ndarray:
    return np.linspace(game.box.lower[i], game.box.upper[i], points)[:, None]


def curvature_bounds(game: GameSpec, points: int = GRID_POINTS) -> Tuple[float, float]:
    """(μ, L) for the own-curvature of every component over the box"""
    if game.kind is GameKind.EV:
        q = game.params.q
        return float(q.min()), float(q.max())

    s_low, s_high = coupling_extremes(game)
    mu, lip = np.inf, 0.0
    for i in range(game.n):
        own = _own_grid(game, i, points)
        # σ' is unimodal in z, so its minimum sits at an end of the coupling range
        # and its maximum at the coupling value that brings z closest to 0
        r = game.params.r[i][None, :]
        s_peak = np.clip(r - game.slope[i] * own, s_low[i], s_high[i])
        for s in (s_low[i], s_high[i]):
            values = component_sweep(game, "curvature", i, own, np.full_like(own, s))
            mu = min(mu, float(values.min()))
            lip = max(lip, float(values.max()))
        lip = max(lip, float(component_sweep(game, "curvature", i, own, s_peak).max()))
    return mu, lip


def gradient_bound(game: GameSpec, points: int = GRID_POINTS) -> float:
    """G: max |component gradient| over the own-coordinate grid, others at box extremes"""
    s_low, s_high = coupling_extremes(game)
    bound = 0.0
    for i in range(game.n):
        own = _own_grid(game, i, points)
        for s in (s_low[i], s_high[i]):
            values = component_sweep(game, "grad", i, own, np.full_like(own, s))
            bound = max(bound, float(np.abs(values).max()))
    return bound


def monotonicity_constants(
    game: GameSpec,
    num_pairs: int = MONOTONICITY_PAIRS,
    seed: int = 0,
) -> Tuple[float, float]:
    """
    Strong monotonicity modulus μ_F and Lipschitz constant of ∇F

    EV: exact, from the constant Jacobian diag(q̄) + C. Edge: the minimum of
    ⟨∇F(x)-∇F(y), x-y⟩/‖x-y‖² over sampled pairs, further capped by the
    smallest eigenvalue of the symmetrized Jacobian at the sampled points.

    Raises:
        MonotonicityViolationError: μ_F <= 0
    """
    if game.kind is GameKind.EV:
        jacobian = np.diag(game.params.q.mean(axis=1)) + game.coupling
        sym = 0.5 * (jacobian + jacobian.T)
        muF = float(np.linalg.eigvalsh(sym)[0])
        lipF = float(np.linalg.norm(jacobian, 2))
    else:
        rng = np.random.default_rng(seed)
        muF, lipF = np.inf, 0.0
        for _ in range(num_pairs):
            x = game.box.sample(rng)
            y = game.box.sample(rng)
            delta = x - y
            gap = full_pseudo_gradient(game, x) - full_pseudo_gradient(game, y)
            muF = min(muF, float(gap @ delta / (delta @ delta)))
            jacobian = pseudo_jacobian(game, x)
            sym = 0.5 * (jacobian + jacobian.T)
            muF = min(muF, float(np.linalg.eigvalsh(sym)[0]))
            lipF = max(lipF, float(np.linalg.norm(jacobian, 2)))

    if muF <= 0.0:
        raise MonotonicityViolationError(f"pseudo-gradient is not strongly monotone: muF={muF:.6g}")
    return muF, lipF


def game_constants(
    game: GameSpec,
    x_star: ActionProfile,
    grid_points: int = GRID_POINTS,
    num_pairs: int = MONOTONICITY_PAIRS,
    seed: int = 0,
) -> GameConstants:
    """
    Extract μ, L, μ_F, G, σ⋆² and κ for a game

    Args:
        game: the game
        x_star: its Nash equilibrium
        grid_points: grid density per own coordinate
        num_pairs: sampled pairs for the monotonicity estimate
        seed: sampling seed for the monotonicity estimate

    Returns:
        GameConstants: raw (uninflated) constants
    """
    mu, lip = curvature_bounds(game, grid_points)
    muF, lipF = monotonicity_constants(game, num_pairs, seed)
    gbound = gradient_bound(game, grid_points)
    table = component_grad_table(game, x_star)
    sigma_star_sq = float(np.mean(table ** 2))

    constants = GameConstants(
        mu=mu,
        lip=lip,
        muF=muF,
        gbound=gbound,
        sigma_star_sq=sigma_star_sq,
        kappa_cond=lip / mu,
        lipF=lipF,
    )
    logger.info(
        f"Game constants: mu={mu:.4g} L={lip:.4g} muF={muF:.4g} "
        f"G={gbound:.4g} sigma*^2={sigma_star_sq:.4g}"
    )
    return constants

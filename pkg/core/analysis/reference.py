"""
Reference trajectory and shuffling variance

The reference trajectory is the path the equilibrium itself traces under one
permutation per player, with every component gradient frozen at x⋆:
    x⋆^ℓ = P[x⋆ - α Σ_{p<ℓ} ∇f_i(x⋆; π_p^i)]
For an interior equilibrium it returns to x⋆ at ℓ = m. The shuffling variance
of player i is max_ℓ E[D_{f_i(.; π_ℓ^i)}(x⋆^ℓ_i, x⋆_i)], the expectation taken
jointly over the permutation tuple.
"""

from dataclasses import dataclass
from typing import Sequence, Union
import logging

import numpy as np

from ..game.costs import component_grad_table, component_sweep
from ..game.spec import GameSpec
from ..sampling.permutations import Permutation
from .oracles import NESolution

logger = logging.getLogger(__name__)

DEFAULT_NUM_PERMS = 512

PermutationTuple = Union[Sequence[Permutation], np.ndarray]


@dataclass(frozen=True, eq=False)
class ReferenceTrajectory:
    """points[ℓ] = x⋆^ℓ for ℓ = 0..m"""
    points: np.ndarray
    alpha: float

    @property
    def m(self) -> int:
        return int(self.points.shape[0]) - 1

    def endpoint_gap(self) -> float:
        return float(np.linalg.norm(self.points[-1] - self.points[0]))


@dataclass(frozen=True, eq=False)
class ShuffleVarianceEstimate:
    """Monte Carlo shuffling variance per player"""
    sigma_shuffle_sq: np.ndarray
    std_error: np.ndarray
    num_permutations: int
    alpha: float
    approximate: bool = False


def _order_matrix(perms: PermutationTuple, n: int) -> np.ndarray:
    """(n, m) integer array, row i = player i's order"""
    if isinstance(perms, np.ndarray):
        orders = np.asarray(perms, dtype=np.int64)
    else:
        orders = np.stack([p.order if isinstance(p, Permutation) else np.asarray(p) for p in perms])
    if orders.ndim != 2 or orders.shape[0] != n:
        raise ValueError(f"expected one permutation per player ({n}), got shape {orders.shape}")
    return orders


def _trajectories(game: GameSpec, x_star: np.ndarray, alpha: float, orders: np.ndarray) -> np.ndarray:
    """
    Batched reference trajectories

    Args:
        orders: (S, n, m) permutation tuples

    Returns:
        np.ndarray: (S, m+1, n) points
    """
    table = component_grad_table(game, x_star)
    rows = np.arange(game.n)[None, :, None]
    permuted = table[rows, orders]                              # (S, n, m)
    cumulative = np.concatenate(
        [np.zeros(permuted.shape[:2] + (1,)), np.cumsum(permuted, axis=2)],
        axis=2,
    )
    points = x_star[None, :, None] - alpha * cumulative         # (S, n, m+1)
    points = np.clip(points, game.box.lower[None, :, None], game.box.upper[None, :, None])
    return np.transpose(points, (0, 2, 1))


def reference_trajectory(
    game: GameSpec,
    ne: NESolution,
    alpha: float,
    perms: PermutationTuple,
) -> ReferenceTrajectory:
    """
    Reference trajectory for one permutation per player

    Args:
        game: the game
        ne: its equilibrium
        alpha: step size
        perms: n permutations, or an (n, m) array of 0-based orders

    Returns:
        ReferenceTrajectory: m+1 points starting at x⋆
    """
    orders = _order_matrix(perms, game.n)
    points = _trajectories(game, np.asarray(ne.x_star), alpha, orders[None, :, :])[0]
    points[0] = ne.x_star
    return ReferenceTrajectory(points=points, alpha=alpha)


def _own_bregman(game: GameSpec, i: int, x_star: np.ndarray, own: np.ndarray, comps: np.ndarray) -> np.ndarray:
    """D_{f_i(.; comps)}(own, x⋆_i) with the other players at x⋆; own and comps share a shape"""
    s = float(game.coupling[i] @ x_star)
    flat_own = own.reshape(-1, 1)
    cost = component_sweep(game, "cost", i, flat_own, s)
    anchor = np.array([[x_star[i]]])
    cost_star = component_sweep(game, "cost", i, anchor, s)[0]
    grad_star = component_sweep(game, "grad", i, anchor, s)[0]
    pick = comps.reshape(-1)
    rows = np.arange(pick.shape[0])
    divergence = cost[rows, pick] - cost_star[pick] - grad_star[pick] * (flat_own[:, 0] - x_star[i])
    return divergence.reshape(own.shape)


def shuffling_variance_mc(
    game: GameSpec,
    ne: NESolution,
    alpha: float,
    num_perms: int = DEFAULT_NUM_PERMS,
    rng: np.random.Generator | None = None,
) -> ShuffleVarianceEstimate:
    """
    Monte Carlo estimate of the shuffling variance of every player

    Args:
        game: the game
        ne: its equilibrium
        alpha: step size
        num_perms: sampled permutation tuples
        rng: generator for the permutations

    Returns:
        ShuffleVarianceEstimate: flagged approximate for a boundary equilibrium
    """
    if num_perms < 2:
        raise ValueError(f"num_perms must be >= 2, got {num_perms}")
    rng = rng or np.random.default_rng(0)
    n, m = game.n, game.m
    x_star = np.asarray(ne.x_star)

    orders = np.argsort(rng.random((num_perms, n, m)), axis=2)
    points = _trajectories(game, x_star, alpha, orders)          # (S, m+1, n)

    sigma = np.zeros(n)
    std_error = np.zeros(n)
    for i in range(n):
        own = points[:, :m, i]                                   # (S, m), ℓ = 0..m-1
        divergence = _own_bregman(game, i, x_star, own, orders[:, i, :])
        means = divergence.mean(axis=0)
        worst = int(np.argmax(means))
        sigma[i] = max(float(means[worst]), 0.0)
        std_error[i] = float(divergence[:, worst].std(ddof=1) / np.sqrt(num_perms))

    if not ne.interior:
        logger.warning("Equilibrium is on the boundary; shuffling variance estimate is approximate")
    return ShuffleVarianceEstimate(
        sigma_shuffle_sq=sigma,
        std_error=std_error,
        num_permutations=num_perms,
        alpha=alpha,
        approximate=not ne.interior,
    )

"""
Component cost and gradient oracles

All oracles share one kernel per game kind. A kernel receives gathered
parameters, the player's own action and its coupling sum Σ_j C_ij x_j, so the
same code serves a single (i, ell) evaluation, a batched inner step where every
player uses its own sampled component, and the full (n, m) component table.
"""

from typing import Callable, Dict
import logging

import numpy as np
import numpy.typing as npt
from scipy.special import expit

from ..errors import GameDomainError
from .spec import ActionProfile, EstimateMatrix, GameKind, GameSpec

logger = logging.getLogger(__name__)

Kernel = Callable[..., np.ndarray]


def _gather(game: GameSpec, rows, cols) -> Dict[str, np.ndarray]:
    params = {name: getattr(game.params, name)[rows, cols] for name in game.params.COLUMNS}
    if game.kind is GameKind.EDGE:
        params["cap"] = game.capacity[rows]
        params["beta"] = game.slope[rows]
    return params


def _check_edge_domain(p: Dict[str, np.ndarray], own: np.ndarray) -> None:
    if np.any(own <= 0.0) or np.any(own >= p["cap"]):
        raise GameDomainError(
            "Edge component evaluated outside (0, capacity): "
            f"own action range [{np.min(own):.6g}, {np.max(own):.6g}]"
        )


# EV: q/2 (x_i - d)^2 + b x_i + x_i s

def _ev_cost(p, own, s):
    return 0.5 * p["q"] * (own - p["d"]) ** 2 + p["b"] * own + own * s


def _ev_grad(p, own, s):
    return p["q"] * (own - p["d"]) + p["b"] + s


def _ev_curvature(p, own, s):
    return p["q"] * np.ones_like(own + s)


def _ev_cross(p, own, s):
    return np.ones_like(p["q"] * (own + s))


# Edge: a (x ln x - x) - κ ln(c̄ - x) + b x + dcong log(1 + exp(β x + s - r))

def _edge_z(p, own, s):
    return p["beta"] * own + s - p["r"]


def _edge_cost(p, own, s):
    _check_edge_domain(p, own)
    z = _edge_z(p, own, s)
    return (
        p["a"] * (own * np.log(own) - own)
        - p["kappa"] * np.log(p["cap"] - own)
        + p["b"] * own
        + p["dcong"] * np.logaddexp(0.0, z)
    )


def _edge_grad(p, own, s):
    _check_edge_domain(p, own)
    z = _edge_z(p, own, s)
    return (
        p["a"] * np.log(own)
        + p["kappa"] / (p["cap"] - own)
        + p["b"]
        + p["dcong"] * p["beta"] * expit(z)
    )


def _edge_curvature(p, own, s):
    _check_edge_domain(p, own)
    sig = expit(_edge_z(p, own, s))
    return (
        p["a"] / own
        + p["kappa"] / (p["cap"] - own) ** 2
        + p["dcong"] * p["beta"] ** 2 * sig * (1.0 - sig)
    )


def _edge_cross(p, own, s):
    # ∂²f_i / ∂x_i ∂x_j = dcong β σ'(z) C_ij; this returns the factor before C_ij
    sig = expit(_edge_z(p, own, s))
    return p["dcong"] * p["beta"] * sig * (1.0 - sig)


_KERNELS: Dict[GameKind, Dict[str, Kernel]] = {
    GameKind.EV: {
        "cost": _ev_cost,
        "grad": _ev_grad,
        "curvature": _ev_curvature,
        "cross": _ev_cross,
    },
    GameKind.EDGE: {
        "cost": _edge_cost,
        "grad": _edge_grad,
        "curvature": _edge_curvature,
        "cross": _edge_cross,
    },
}


def _profile(game: GameSpec, x: npt.ArrayLike) -> ActionProfile:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (game.n,):
        raise GameDomainError(f"action profile must have shape ({game.n},), got {x.shape}")
    return x


def _single(game: GameSpec, which: str, i: int, ell: int, x: npt.ArrayLike) -> float:
    game.check_index(i, ell)
    x = _profile(game, x)
    p = _gather(game, i, ell)
    own = np.asarray(x[i])
    s = np.asarray(game.coupling[i] @ x)
    return float(_KERNELS[game.kind][which](p, own, s))


def component_cost(game: GameSpec, i: int, ell: int, x: npt.ArrayLike) -> float:
    """f_i(x; ell)"""
    return _single(game, "cost", i, ell, x)


def component_grad(game: GameSpec, i: int, ell: int, x: npt.ArrayLike) -> float:
    """
    Own-action partial derivative of one component cost

    Args:
        game: the game
        i: player index (0-based)
        ell: component index (0-based)
        x: joint action profile

    Returns:
        float: ∂f_i(x; ell) / ∂x_i

    Raises:
        GameDomainError: index out of range, or Edge evaluation with
            x_i <= 0 or x_i >= capacity_i
    """
    return _single(game, "grad", i, ell, x)


def component_curvature(game: GameSpec, i: int, ell: int, x: npt.ArrayLike) -> float:
    """∂²f_i(x; ell) / ∂x_i²"""
    return _single(game, "curvature", i, ell, x)


def component_grads(game: GameSpec, idx: np.ndarray, x: npt.ArrayLike) -> np.ndarray:
    """Gradient of component idx[i] for every player i, all at the shared profile x"""
    x = _profile(game, x)
    rows = np.arange(game.n)
    p = _gather(game, rows, idx)
    return _KERNELS[game.kind]["grad"](p, x, game.coupling @ x)


def local_component_grads(game: GameSpec, idx: np.ndarray, y: EstimateMatrix) -> np.ndarray:
    """Gradient of component idx[i] for every player i, at player i's own estimate row y[i]"""
    rows = np.arange(game.n)
    p = _gather(game, rows, idx)
    own = np.diagonal(y)
    s = np.einsum("ij,ij->i", game.coupling, y)
    return _KERNELS[game.kind]["grad"](p, own, s)


def _table(game: GameSpec, which: str, x: npt.ArrayLike) -> np.ndarray:
    x = _profile(game, x)
    rows = np.arange(game.n)[:, None]
    cols = np.arange(game.m)[None, :]
    p = _gather(game, rows, cols)
    own = x[:, None]
    s = (game.coupling @ x)[:, None]
    return _KERNELS[game.kind][which](p, own, s)


def component_grad_table(game: GameSpec, x: npt.ArrayLike) -> np.ndarray:
    """(n, m) table of every component gradient at x"""
    return _table(game, "grad", x)


def component_cost_table(game: GameSpec, x: npt.ArrayLike) -> np.ndarray:
    """(n, m) table of every component cost at x"""
    return _table(game, "cost", x)


def full_pseudo_gradient(game: GameSpec, x: npt.ArrayLike) -> np.ndarray:
    """∇F(x): entry i is the mean over ell of the component gradients of player i"""
    return component_grad_table(game, x).mean(axis=1)


def pseudo_jacobian(game: GameSpec, x: npt.ArrayLike) -> np.ndarray:
    """Analytic Jacobian of ∇F at x"""
    curvature = _table(game, "curvature", x).mean(axis=1)
    cross = _table(game, "cross", x).mean(axis=1)
    jacobian = cross[:, None] * game.coupling
    jacobian[np.diag_indices(game.n)] = curvature
    return jacobian


def bregman_divergence(
    game: GameSpec,
    i: int,
    ell: int,
    u_i: float,
    v: npt.ArrayLike,
) -> float:
    """
    Bregman divergence of f_i(.; ell) in the own coordinate

    D(u_i, v_i) = f_i(u_i, v_-i) - f_i(v) - ∂f_i(v)(u_i - v_i), with the other
    players held at v_-i.
    """
    v = _profile(game, v)
    u = v.copy()
    u[i] = u_i
    return (
        component_cost(game, i, ell, u)
        - component_cost(game, i, ell, v)
        - component_grad(game, i, ell, v) * (u_i - v[i])
    )


def component_sweep(
    game: GameSpec,
    which: str,
    i: int,
    own: np.ndarray,
    s: np.ndarray,
) -> np.ndarray:
    """
    Evaluate one kernel for player i over every component at many points

    Args:
        game: the game
        which: "cost", "grad" or "curvature"
        i: player index
        own: own-action values, shape (G, 1)
        s: coupling sums broadcastable to (G, m)

    Returns:
        np.ndarray: (G, m) values
    """
    game.check_index(i, 0)
    p = _gather(game, i, np.arange(game.m)[None, :])
    return _KERNELS[game.kind][which](p, own, s)

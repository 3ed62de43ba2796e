"""
Benchmark game generators

EV charging game (quadratic components, affine pseudo-gradient) and edge
resource admission game (entropy + barrier + log-sum-exp congestion). Both are
deterministic in their seed.
"""

from typing import Tuple
import logging

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..errors import ConfigurationError
from .spec import Box, EdgeParamTable, EVParamTable, GameKind, GameSpec

logger = logging.getLogger(__name__)

Range = Tuple[float, float]


class EVRanges(BaseModel):
    """Uniform sampling ranges for the EV charging game"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    q: Range = (1.0, 2.0)
    d: Range = (0.5, 1.5)
    b: Range = (-0.2, 0.2)
    coupling_strength: float = 0.5   # ‖C‖₂ as a fraction of min_i q̄_i
    box_margin: float = 3.0          # box = NE ± box_margin·‖NE‖∞
    min_half_width: float = 1.0

    def validate_ranges(self) -> None:
        _check_range("q", self.q, positive=True)
        _check_range("d", self.d)
        _check_range("b", self.b)
        if not 0.0 <= self.coupling_strength <= 0.5:
            raise ConfigurationError("must lie in [0, 0.5]", key="coupling_strength")
        if self.box_margin <= 0 or self.min_half_width <= 0:
            raise ConfigurationError("box margins must be positive", key="box_margin")


class EdgeRanges(BaseModel):
    """Uniform sampling ranges for the edge resource admission game"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    a: Range = (1.0, 2.0)
    kappa: Range = (0.05, 0.2)
    b: Range = (0.0, 0.5)
    dcong: Range = (0.1, 0.5)
    r: Range = (0.5, 1.5)
    capacity: Range = (2.0, 3.0)
    slope: Range = (0.5, 1.0)
    coupling_strength: float = 0.5
    box_lower: float = 0.2
    box_upper_fraction: float = 0.8   # upper_i = fraction · c̄_i

    def validate_ranges(self) -> None:
        _check_range("a", self.a, positive=True)
        _check_range("kappa", self.kappa, nonnegative=True)
        _check_range("b", self.b)
        _check_range("dcong", self.dcong, nonnegative=True)
        _check_range("r", self.r)
        _check_range("capacity", self.capacity, positive=True)
        _check_range("slope", self.slope)
        if not 0.0 <= self.coupling_strength <= 0.5:
            raise ConfigurationError("must lie in [0, 0.5]", key="coupling_strength")
        if not 0.0 < self.box_upper_fraction < 1.0:
            raise ConfigurationError("must lie in (0, 1)", key="box_upper_fraction")
        if not 0.0 < self.box_lower < self.box_upper_fraction * self.capacity[0]:
            raise ConfigurationError(
                "must satisfy 0 < box_lower < box_upper_fraction * min capacity",
                key="box_lower",
            )


def _check_range(
    key: str,
    bounds: Range,
    positive: bool = False,
    nonnegative: bool = False,
) -> None:
    low, high = bounds
    if not (np.isfinite(low) and np.isfinite(high)):
        raise ConfigurationError("range bounds must be finite", key=key)
    if low > high:
        raise ConfigurationError(f"empty range ({low}, {high})", key=key)
    if positive and low <= 0:
        raise ConfigurationError(f"range must be positive, got low={low}", key=key)
    if nonnegative and low < 0:
        raise ConfigurationError(f"range must be nonnegative, got low={low}", key=key)


def _check_size(n: int, m: int) -> None:
    if n < 2:
        raise ConfigurationError(f"need at least 2 players, got {n}", key="n")
    if m < 1:
        raise ConfigurationError(f"need at least 1 component, got {m}", key="m")


def _draw(rng: np.random.Generator, bounds: Range, size) -> np.ndarray:
    return rng.uniform(bounds[0], bounds[1], size=size)


def symmetric_coupling(rng: np.random.Generator, n: int, spectral_norm: float) -> np.ndarray:
    """Nonnegative symmetric zero-diagonal matrix with the requested spectral norm"""
    raw = rng.uniform(0.0, 1.0, size=(n, n))
    coupling = np.triu(raw, k=1)
    coupling = coupling + coupling.T
    norm = np.linalg.norm(coupling, 2)
    if norm == 0.0 or spectral_norm == 0.0:
        return np.zeros((n, n))
    return coupling * (spectral_norm / norm)


def make_ev_game(n: int, m: int, seed: int, ranges: EVRanges | None = None) -> GameSpec:
    """
    Build an EV charging game

    The box is centered on the unconstrained equilibrium with half-width
    max(box_margin·‖NE‖∞, min_half_width), so the equilibrium is interior.

    Args:
        n: number of players (>= 2)
        m: components per player (>= 1)
        seed: generator seed
        ranges: sampling ranges

    Returns:
        GameSpec: EV game
    """
    ranges = ranges or EVRanges()
    _check_size(n, m)
    ranges.validate_ranges()

    rng = np.random.default_rng(seed)
    q = _draw(rng, ranges.q, (n, m))
    d = _draw(rng, ranges.d, (n, m))
    b = _draw(rng, ranges.b, (n, m))
    q_bar = q.mean(axis=1)
    coupling = symmetric_coupling(rng, n, ranges.coupling_strength * float(q_bar.min()))

    # ∇F(x) = (diag(q̄) + C) x - mean(q d) + b̄
    affine = np.diag(q_bar) + coupling
    x_star = np.linalg.solve(affine, (q * d).mean(axis=1) - b.mean(axis=1))
    half_width = max(ranges.box_margin * float(np.max(np.abs(x_star))), ranges.min_half_width)
    box = Box(x_star - half_width, x_star + half_width)

    game = GameSpec(
        kind=GameKind.EV,
        box=box,
        coupling=coupling,
        params=EVParamTable(q=q, d=d, b=b),
    )
    logger.info(f"Built EV game n={n} m={m} seed={seed} hash={game.content_hash()[:12]}")
    return game


def make_edge_game(n: int, m: int, seed: int, ranges: EdgeRanges | None = None) -> GameSpec:
    """
    Build an edge resource admission game

    Box is [box_lower, box_upper_fraction·c̄_i], strictly inside the barrier
    domain (0, c̄_i). Coupling is scaled against the smallest entropy
    curvature ā_i / upper_i.

    Args:
        n: number of players (>= 2)
        m: components per player (>= 1)
        seed: generator seed
        ranges: sampling ranges

    Returns:
        GameSpec: Edge game
    """
    ranges = ranges or EdgeRanges()
    _check_size(n, m)
    ranges.validate_ranges()

    rng = np.random.default_rng(seed)
    a = _draw(rng, ranges.a, (n, m))
    kappa = _draw(rng, ranges.kappa, (n, m))
    b = _draw(rng, ranges.b, (n, m))
    dcong = _draw(rng, ranges.dcong, (n, m))
    r = _draw(rng, ranges.r, (n, m))
    capacity = _draw(rng, ranges.capacity, n)
    slope = _draw(rng, ranges.slope, n)

    upper = ranges.box_upper_fraction * capacity
    lower = np.full(n, ranges.box_lower)
    curvature_floor = float(np.min(a.mean(axis=1) / upper))
    coupling = symmetric_coupling(rng, n, ranges.coupling_strength * curvature_floor)

    game = GameSpec(
        kind=GameKind.EDGE,
        box=Box(lower, upper),
        coupling=coupling,
        params=EdgeParamTable(a=a, kappa=kappa, b=b, dcong=dcong, r=r),
        capacity=capacity,
        slope=slope,
    )
    logger.info(f"Built Edge game n={n} m={m} seed={seed} hash={game.content_hash()[:12]}")
    return game

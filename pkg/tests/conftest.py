"""
Shared fixtures
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from core.game import Box, EVParamTable, GameKind, GameSpec, make_edge_game, make_ev_game
from core.game.constants import GameConstants
from core.network import build_H, make_network


@pytest.fixture
def ev_game_factory():
    """Build an EV game from explicit (n, m) tables; scalars broadcast"""

    def build(n, m, q=1.0, d=1.0, b=0.0, coupling=None, lower=-5.0, upper=5.0):
        shape = (n, m)
        return GameSpec(
            kind=GameKind.EV,
            box=Box(np.broadcast_to(lower, n), np.broadcast_to(upper, n)),
            coupling=np.zeros((n, n)) if coupling is None else np.asarray(coupling, dtype=float),
            params=EVParamTable(
                q=np.broadcast_to(q, shape),
                d=np.broadcast_to(d, shape),
                b=np.broadcast_to(b, shape),
            ),
        )

    return build


@pytest.fixture
def symmetric_game(ev_game_factory):
    """Two players, q=1, d=1, b=0, C12=C21=0.5; equilibrium (2/3, 2/3)"""
    return ev_game_factory(2, 3, coupling=[[0.0, 0.5], [0.5, 0.0]], lower=0.0, upper=2.0)


@pytest.fixture
def ev_game():
    return make_ev_game(3, 4, seed=1)


@pytest.fixture
def edge_game():
    return make_edge_game(3, 4, seed=2)


@pytest.fixture
def ring4():
    return make_network("ring", 4)


@pytest.fixture
def ring4_H(ring4):
    return build_H(ring4)


@pytest.fixture
def unit_constants():
    """mu=1, L=4"""
    return GameConstants(mu=1.0, lip=4.0, muF=1.0, gbound=2.0, sigma_star_sq=0.1, kappa_cond=4.0, lipF=4.0)

"""
Game parameter tables as CSV

game_params.csv has one row per (player, component), indices 1-based:
    EV:   player, component, q, d, b, lower, upper
    Edge: player, component, a, kappa, b, dcong, r, lower, upper, capacity, slope
Per-player columns (lower, upper, capacity, slope) repeat on every row of that
player. coupling.csv holds the n x n coupling matrix without header.
"""

from pathlib import Path
import logging

import numpy as np
import pandas as pd

from ..errors import ConfigurationError
from .spec import Box, EdgeParamTable, EVParamTable, GameKind, GameSpec

logger = logging.getLogger(__name__)

PARAMS_FILE = "game_params.csv"
COUPLING_FILE = "coupling.csv"

EV_COLUMNS = ("player", "component", "q", "d", "b", "lower", "upper")
EDGE_COLUMNS = (
    "player", "component", "a", "kappa", "b", "dcong", "r",
    "lower", "upper", "capacity", "slope",
)


def param_frame(game: GameSpec) -> pd.DataFrame:
    """Flat parameter table in the documented column order"""
    n, m = game.n, game.m
    columns = {
        "player": np.repeat(np.arange(1, n + 1), m),
        "component": np.tile(np.arange(1, m + 1), n),
    }
    for name in game.params.COLUMNS:
        columns[name] = getattr(game.params, name).reshape(-1)
    columns["lower"] = np.repeat(game.box.lower, m)
    columns["upper"] = np.repeat(game.box.upper, m)
    if game.kind is GameKind.EDGE:
        columns["capacity"] = np.repeat(game.capacity, m)
        columns["slope"] = np.repeat(game.slope, m)
    order = EV_COLUMNS if game.kind is GameKind.EV else EDGE_COLUMNS
    return pd.DataFrame(columns)[list(order)]


def write_game_tables(game: GameSpec, directory: Path) -> None:
    """Write game_params.csv and coupling.csv into directory"""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    param_frame(game).to_csv(directory / PARAMS_FILE, index=False, float_format="%.17g")
    pd.DataFrame(game.coupling).to_csv(
        directory / COUPLING_FILE, index=False, header=False, float_format="%.17g"
    )
    logger.info(f"Wrote game tables to {directory}")


def load_game_tables(directory: Path) -> GameSpec:
    """Rebuild a GameSpec from game_params.csv and coupling.csv"""
    directory = Path(directory)
    frame = pd.read_csv(directory / PARAMS_FILE, float_precision="round_trip")
    coupling = pd.read_csv(directory / COUPLING_FILE, header=None, float_precision="round_trip").to_numpy(dtype=np.float64)

    if tuple(frame.columns) == EV_COLUMNS:
        kind = GameKind.EV
    elif tuple(frame.columns) == EDGE_COLUMNS:
        kind = GameKind.EDGE
    else:
        raise ConfigurationError(f"unrecognized parameter table columns: {list(frame.columns)}")

    frame = frame.sort_values(["player", "component"])
    n = int(frame["player"].max())
    m = int(frame["component"].max())
    if len(frame) != n * m:
        raise ConfigurationError(f"expected {n * m} parameter rows, found {len(frame)}")

    def table(name: str) -> np.ndarray:
        return frame[name].to_numpy(dtype=np.float64).reshape(n, m)

    def per_player(name: str) -> np.ndarray:
        return table(name)[:, 0]

    box = Box(per_player("lower"), per_player("upper"))
    if kind is GameKind.EV:
        return GameSpec(
            kind=kind,
            box=box,
            coupling=coupling,
            params=EVParamTable(q=table("q"), d=table("d"), b=table("b")),
        )
    return GameSpec(
        kind=kind,
        box=box,
        coupling=coupling,
        params=EdgeParamTable(
            a=table("a"),
            kappa=table("kappa"),
            b=table("b"),
            dcong=table("dcong"),
            r=table("r"),
        ),
        capacity=per_player("capacity"),
        slope=per_player("slope"),
    )

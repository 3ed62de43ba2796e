"""
Doubly stochastic mixing via Metropolis weights
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional
import hashlib
import logging

import numpy as np
import pandas as pd

from .graph import GraphKind, build_graph, validate_adjacency

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class NetworkSpec:
    """
    Communication network

    Attributes:
        adjacency: symmetric 0/1 matrix
        weights: edge weights a_ij used by the estimate update (1 on edges)
        W: symmetric doubly stochastic mixing matrix
        eta: smallest positive entry of W
        kind: label of the graph family, for reports only
    """
    adjacency: np.ndarray
    weights: np.ndarray
    W: np.ndarray
    eta: float
    kind: str = "custom"

    def __post_init__(self):
        for name in ("adjacency", "weights", "W"):
            array = np.array(getattr(self, name), dtype=np.float64, copy=True)
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    @property
    def n(self) -> int:
        return int(self.adjacency.shape[0])

    def neighbors(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[i])

    def content_hash(self) -> str:
        digest = hashlib.sha256()
        for array in (self.adjacency, self.weights, self.W):
            digest.update(np.ascontiguousarray(array).tobytes())
        return digest.hexdigest()


def metropolis_weights(adjacency: np.ndarray, kind: str = "custom") -> NetworkSpec:
    """
    Metropolis mixing matrix for a connected graph

    w_ij = 1 / (1 + max(deg_i, deg_j)) on edges; the diagonal takes the rest of
    each row.

    Raises:
        GraphError: adjacency not symmetric, not 0/1 or not connected
    """
    validate_adjacency(adjacency)
    adjacency = np.asarray(adjacency, dtype=np.float64)
    degree = adjacency.sum(axis=1)
    pair_max = np.maximum(degree[:, None], degree[None, :])
    W = np.where(adjacency > 0, 1.0 / (1.0 + pair_max), 0.0)
    W[np.diag_indices_from(W)] = 1.0 - W.sum(axis=1)
    eta = float(W[W > 0].min())
    logger.debug(f"Metropolis weights for n={adjacency.shape[0]}, eta={eta:.4g}")
    return NetworkSpec(
        adjacency=adjacency,
        weights=adjacency.copy(),
        W=W,
        eta=eta,
        kind=kind,
    )


def make_network(
    kind: GraphKind | str,
    n: int,
    seed: int = 0,
    p: Optional[float] = None,
) -> NetworkSpec:
    """build_graph followed by metropolis_weights"""
    kind = GraphKind(kind)
    return metropolis_weights(build_graph(kind, n, seed=seed, p=p), kind=kind.value)


def write_network_tables(network: NetworkSpec, directory: Path) -> None:
    """Dump adjacency.csv and W.csv (headerless matrices)"""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(network.adjacency.astype(int)).to_csv(
        directory / "adjacency.csv", index=False, header=False
    )
    pd.DataFrame(network.W).to_csv(
        directory / "W.csv", index=False, header=False, float_format="%.17g"
    )

"""
Component sampling: random reshuffling and with-replacement draws

Component indices are 0-based in code; files and reports show them 1-based.
"""

from dataclasses import dataclass
from enum import Enum
import logging

import numpy as np

from ..errors import SamplingError
from .streams import StreamFactory, StreamPurpose

logger = logging.getLogger(__name__)


class SamplingMode(str, Enum):
    """Component sampling rule"""
    RR = "rr"     # fresh permutation per player per epoch
    SGD = "sgd"   # i.i.d. uniform draws with replacement


@dataclass(frozen=True, eq=False)
class Permutation:
    """One pass order over the m components"""
    order: np.ndarray

    def __post_init__(self):
        order = np.array(self.order, dtype=np.int64, copy=True)
        if order.ndim != 1 or not is_permutation(order, order.shape[0]):
            raise SamplingError(f"not a permutation of range({order.shape[0]}): {order}")
        order.setflags(write=False)
        object.__setattr__(self, "order", order)

    @property
    def m(self) -> int:
        return int(self.order.shape[0])

    def one_based(self) -> list[int]:
        return [int(v) + 1 for v in self.order]


def is_permutation(order: np.ndarray, m: int) -> bool:
    return order.shape == (m,) and np.array_equal(np.sort(order), np.arange(m))


def fresh_permutation(rng: np.random.Generator, m: int) -> Permutation:
    """Uniform permutation of range(m) (numpy's Fisher-Yates shuffle)"""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return Permutation(rng.permutation(m))


def draw_with_replacement(rng: np.random.Generator, m: int) -> int:
    """Uniform component index in range(m)"""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return int(rng.integers(m))


class EpochSampler:
    """
    Per-epoch component schedule for all players

    indices(k) returns an (m, n) integer array: column i lists the components
    player i evaluates at inner steps 0..m-1 of epoch k. RR columns are
    checked to be permutations before they are handed out.
    """

    def __init__(self, streams: StreamFactory, n: int, m: int, mode: SamplingMode | str):
        self.streams = streams
        self.n = n
        self.m = m
        self.mode = SamplingMode(mode)
        self.draws = 0

    def indices(self, epoch: int) -> np.ndarray:
        columns = []
        for i in range(self.n):
            rng = self.streams.generator(StreamPurpose.SAMPLING, i, epoch)
            if self.mode is SamplingMode.RR:
                column = fresh_permutation(rng, self.m).order
            else:
                column = rng.integers(self.m, size=self.m)
            columns.append(column)
        idx = np.stack(columns, axis=1)

        if self.mode is SamplingMode.RR:
            for i in range(self.n):
                if not is_permutation(idx[:, i], self.m):
                    raise SamplingError(f"epoch {epoch}: player {i} did not visit every component once")
        self.draws += self.m * self.n
        return idx

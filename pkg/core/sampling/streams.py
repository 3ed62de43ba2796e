"""
Counter-based random streams

Every (purpose, player, epoch) triple gets its own Philox stream. The key
is derived from the run seed and (purpose, player) through SeedSequence; the
epoch index goes into the Philox counter. Streams never share state, so
players are independent and any epoch can be regenerated on its own.
"""

from enum import IntEnum
import logging

import numpy as np

logger = logging.getLogger(__name__)

# Stream slot used for run-level draws that do not belong to one player.
RUN_SLOT = 2**31 - 1


class StreamPurpose(IntEnum):
    """What a stream is used for"""
    INIT = 0       # x0
    SAMPLING = 1   # permutations or with-replacement indices
    PERTURB = 2    # y0 perturbation


class StreamFactory:
    """Philox generators for one run seed"""

    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError(f"seed must be nonnegative, got {seed}")
        self.seed = int(seed)
        self._keys: dict[tuple[int, int], np.ndarray] = {}

    def _key(self, purpose: StreamPurpose, player: int) -> np.ndarray:
        slot = (int(purpose), int(player))
        key = self._keys.get(slot)
        if key is None:
            sequence = np.random.SeedSequence(self.seed, spawn_key=slot)
            key = sequence.generate_state(2, np.uint64)
            self._keys[slot] = key
        return key

    def generator(self, purpose: StreamPurpose, player: int = RUN_SLOT, epoch: int = 0) -> np.random.Generator:
        """
        Generator for one (purpose, player, epoch)

        Args:
            purpose: stream purpose
            player: player index, or RUN_SLOT for run-level draws
            epoch: epoch index, placed in the counter

        Returns:
            np.random.Generator: fresh generator, independent of every other slot
        """
        counter = np.array([0, 0, epoch, 0], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=self._key(purpose, player), counter=counter))

    def run_generator(self, purpose: StreamPurpose) -> np.random.Generator:
        return self.generator(purpose, RUN_SLOT, 0)

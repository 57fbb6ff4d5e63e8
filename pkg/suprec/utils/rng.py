"""
Counter-based, splittable random streams.

Every random draw in the toolkit comes from a stream addressed by a key tuple such as
(TRIAL, trial_index). Streams are derived from the master seed alone, so the numbers a trial
sees never depend on which worker runs it or in which order.
"""

from functools import lru_cache
from typing import Tuple

import numpy as np

# Purpose tags, the first element of every stream key
TRIAL = 0
MATRIX = 1
OUTAGE = 2
TAIL = 3
SWEEP = 4
DESIGN = 5

SEED_MASK = (1 << 64) - 1

# factories kept alive across calls; least recently used seeds are dropped first
FACTORY_CACHE_SIZE = 256


class StreamFactory:
    """Builds Philox generators keyed by (purpose, index, ...) under one 64-bit master seed"""

    def __init__(self, master_seed: int):
        """
        Args:
            master_seed: Non-negative integer, reduced to 64 bits
        """
        if master_seed < 0:
            raise ValueError("Master seed must be non-negative")
        self.master_seed = int(master_seed) & SEED_MASK

    @classmethod
    def get_factory(cls, master_seed: int) -> "StreamFactory":
        """Get or create the factory for a master seed"""
        return _cached_factory(int(master_seed) & SEED_MASK)

    def sequence(self, *key: int) -> np.random.SeedSequence:
        return np.random.SeedSequence(entropy=self.master_seed, spawn_key=tuple(int(k) for k in key))

    def stream(self, *key: int) -> np.random.Generator:
        """
        Generator for one key. Calling twice with the same key gives two generators
        producing the same numbers.
        """
        return np.random.Generator(np.random.Philox(self.sequence(*key)))

    def derive_seed(self, *key: int) -> int:
        """A 64-bit child master seed, used to give each sweep point its own seed"""
        state = self.sequence(*key).generate_state(1, dtype=np.uint64)
        return int(state[0])


@lru_cache(maxsize=FACTORY_CACHE_SIZE)
def _cached_factory(master_seed: int) -> StreamFactory:
    return StreamFactory(master_seed)


def stream_for(master_seed: int, *key: int) -> np.random.Generator:
    return StreamFactory.get_factory(master_seed).stream(*key)


def batch_ranges(total: int, batch_size: int) -> Tuple[Tuple[int, int], ...]:
    """Split range(total) into consecutive (start, stop) blocks of at most batch_size"""
    if batch_size < 1:
        raise ValueError("Batch size must be at least 1")
    return tuple((start, min(start + batch_size, total)) for start in range(0, total, batch_size))

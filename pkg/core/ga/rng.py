"""
Seeded random substreams.

Every random decision is drawn from a generator keyed by the run seed plus a
tuple of integers (level, generation, individual, purpose), so results never
depend on the order in which work happens.
"""
from __future__ import annotations

from enum import IntEnum

import numpy as np


class Purpose(IntEnum):
    INIT = 1
    SELECT = 2
    PBO = 3
    ROULETTE = 4
    CROSSOVER = 5
    MUTATION = 6
    CASE = 7
    TEXTURE = 8


def substream(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for (seed, *keys)."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(k) for k in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def derive_seed(seed: int, *keys: int) -> int:
    """64-bit child seed for (seed, *keys)."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(k) for k in keys]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0])

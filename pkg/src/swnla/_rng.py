"""Counter-based randomness.

Every random draw is a pure function of a seed and a tuple of integer keys, so
replaying a stream with the same seed reproduces every decision regardless of
how trials are scheduled.
"""

from __future__ import annotations

import numpy as np

_SCALE = 1.0 / float(2**64)


def _mask(keys) -> tuple[int, ...]:
    return tuple(int(k) & 0xFFFFFFFFFFFFFFFF for k in keys)


def keyed_uniform(seed: int, *keys: int) -> float:
    """Uniform draw in [0, 1) determined by ``(seed, *keys)``."""
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=_mask(keys))
    return float(ss.generate_state(1, np.uint64)[0]) * _SCALE


def keyed_generator(seed: int, *keys: int) -> np.random.Generator:
    """A numpy Generator whose stream is determined by ``(seed, *keys)``."""
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=_mask(keys))
    return np.random.Generator(np.random.PCG64(ss))


# Tags separating the key spaces of different sampling sites.
TAG_META = 1
TAG_DOWNSAMPLE = 2
TAG_PCP = 3
TAG_ONLINE = 4
TAG_L1 = 5
TAG_COV = 6
TAG_JL = 7
TAG_STREAM = 8
TAG_BATCHED = 9

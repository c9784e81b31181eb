"""Counter-based seed splitting.

Every random decision derives from one 64-bit trial seed. A consumer asks
for ``stream(seed, *path)``; ``path`` is a tuple of small integers naming the
consumer (see the ``STREAM_*`` constants), and the generator is
``PCG64(SeedSequence(seed, spawn_key=path))``. Streams never share state, so
trials and the stages inside a trial can run in any order.
"""

from __future__ import annotations

import numpy as np

STREAM_SAMPLE = 0
STREAM_PACKING = 1
STREAM_LLL = 2
STREAM_TURAN = 3
STREAM_VERIFY = 4
STREAM_LAYERS = 5
STREAM_HOST = 6


def stream(seed: int | None, *path: int) -> np.random.Generator:
    if seed is None:
        seed = 0
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.PCG64(ss))

"""Counter-based random streams.

Every draw is a pure function of ``(seed, stream, t)``: a Philox key is
derived from the seed and stream id, and the round index sits in the second
counter word so that blocks for different rounds never overlap.
"""
from __future__ import annotations

import numpy as np

LOSSES = 0
SAMPLING = 1


def _key(seed: int, stream: tuple[int, ...]) -> np.ndarray:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(s) for s in stream))
    return ss.generate_state(2, dtype=np.uint64)


class CounterRNG:
    """Random blocks addressed by round index."""

    def __init__(self, seed: int, *stream: int):
        self.seed = int(seed)
        self.stream = tuple(stream)
        self._key = _key(self.seed, self.stream)

    def generator(self, t: int, purpose: int = 0) -> np.random.Generator:
        counter = np.array([0, int(t), int(purpose), 0], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=self._key, counter=counter))

    def uniform(self, t: int, size=None, purpose: int = 0):
        return self.generator(t, purpose).random(size)


def derive_seed(master_seed: int, *path: int) -> int:
    """Child seed as a pure function of the master seed and an index path."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def sample_index(p: np.ndarray, u: float) -> int:
    """Inverse-CDF draw from ``p`` with a uniform ``u`` in [0, 1)."""
    cdf = np.cumsum(p)
    i = int(np.searchsorted(cdf, u * cdf[-1], side="right"))
    i = min(i, len(p) - 1)
    # never return a zero-probability action at the right edge
    while p[i] <= 0.0 and i > 0:
        i -= 1
    return i

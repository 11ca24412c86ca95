"""Counter-based random streams.

Each stream is a Philox generator keyed by (seed, stream_index).  Pair k of a
session always reads stream k, so results do not depend on how pairs are
distributed across workers or in which order they are processed.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


class RngStream:
    __slots__ = ("seed", "stream_index", "generator")

    def __init__(self, seed: int, stream_index: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream_index = int(stream_index) & _MASK64
        key = np.array([self.seed, self.stream_index], dtype=np.uint64)
        self.generator = np.random.Generator(np.random.Philox(key=key))

    def uniform(self) -> float:
        return float(self.generator.random())

    def uniforms(self, n: int) -> np.ndarray:
        return self.generator.random(n)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_index={self.stream_index})"

"""Deterministic, splittable random streams.

Every stream is a Philox (counter-based) generator keyed by a 64-bit seed and
a spawn path.  Two streams with the same ``(seed, stream)`` produce identical
draws on every platform; distinct paths are statistically independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ALGORITHM = "philox4x64-seedsequence"

_U53 = 2.0**-53


@dataclass(frozen=True)
class Rng:
    seed: int = 0
    stream: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        object.__setattr__(self, "stream", tuple(int(s) for s in self.stream))

    @property
    def algorithm(self) -> str:
        return ALGORITHM

    def child(self, index: int) -> Rng:
        """Return the independent sub-stream ``index`` of this stream."""
        return Rng(self.seed, self.stream + (int(index),))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=self.stream)
        return np.random.Generator(np.random.Philox(ss))

    def uniforms(self, count: int) -> np.ndarray:
        """``count`` uniforms on the open interval (0, 1)."""
        k = self.generator().integers(0, 2**53, size=int(count), dtype=np.int64)
        return (k + 0.5) * _U53

    def to_dict(self) -> dict:
        return {"algorithm": ALGORITHM, "seed": int(self.seed), "stream": list(self.stream)}

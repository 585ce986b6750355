"""Joint Monte Carlo sampling of independent variables.

Draws are made in fixed-size blocks.  Block ``b`` of variable ``i`` comes from
the stream ``rng.child(b).child(i)``, so totals depend only on the seed and
the sample size, never on how blocks are scheduled across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

from . import _accel
from .distributions import Distribution
from .rng import Rng


def block_sizes(samples: int, block: int) -> list[int]:
    full, rest = divmod(samples, block)
    return [block] * full + ([rest] if rest else [])


def joint_block(dists: Sequence[Distribution], rng: Rng, b: int, size: int) -> np.ndarray:
    sub = rng.child(b)
    return np.column_stack([d.sample(sub.child(i), size) for i, d in enumerate(dists)])


def map_blocks(dists, rng: Rng, samples: int, block: int, fn: Callable[[np.ndarray], object], workers: int = 1):
    """Apply ``fn`` to each joint block; results come back in block order."""
    sizes = block_sizes(samples, block)

    def run(b):
        return fn(joint_block(dists, rng, b, sizes[b]))

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, range(len(sizes))))
    return [run(b) for b in range(len(sizes))]


def ordering_counts(dists, rng: Rng, samples: int, block: int = 2**17, workers: int = 1):
    """Per-rank counts of strict ordering events and the number of tied draws."""
    n = len(dists)
    parts = map_blocks(dists, rng, samples, block, _accel.classify_orderings, workers)
    counts = np.zeros(math.factorial(n), dtype=np.int64)
    ties = 0
    for c, t in parts:
        counts += c
        ties += t
    return counts, ties


def pair_counts(d1, d2, rng: Rng, samples: int, block: int = 2**17, workers: int = 1):
    """``(#{t2 >= t1}, #{t1 >= t2})`` over joint draws."""

    def count(X):
        return int(np.count_nonzero(X[:, 1] >= X[:, 0])), int(np.count_nonzero(X[:, 0] >= X[:, 1]))

    parts = map_blocks([d1, d2], rng, samples, block, count, workers)
    return sum(p[0] for p in parts), sum(p[1] for p in parts)

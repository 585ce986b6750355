"""Reliability applications: the permutation SP ratio and series-parallel allocation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .config import DEFAULT, Config
from .distributions import Distribution
from .estimates import ProbEstimate
from .montecarlo import map_blocks
from .permutations import parse_permutation
from .rng import Rng


def sp_ratio(p_target, p_rival):
    """``p_target / (p_target + p_rival)``.

    For coupled realisations ordered by the two permutation events, this is
    the probability that the target system outlives the rival.  Fractions
    in give a Fraction out.
    """
    if p_target < 0 or p_rival < 0:
        raise ValueError("probabilities must be nonnegative")
    total = p_target + p_rival
    if total == 0:
        raise ZeroDivisionError("sp_ratio undefined when both probabilities are zero")
    if isinstance(p_target, Fraction) or isinstance(p_rival, Fraction):
        return Fraction(p_target) / Fraction(total)
    return p_target / total


@dataclass(frozen=True)
class AllocationSpec:
    """Assignment of three components to a series slot and a parallel pair (1-based)."""

    series: int
    parallel: tuple[int, int]

    def __post_init__(self):
        parse_permutation((self.series, *self.parallel), 3)

    @classmethod
    def parse(cls, text) -> AllocationSpec:
        """``"3,1,2"`` puts component 3 in series with 1 and 2 in parallel."""
        s, a, b = parse_permutation(text, 3)
        return cls(s, (a, b))

    def lifetime(self, X: np.ndarray) -> np.ndarray:
        a, b = self.parallel
        return np.minimum(X[:, self.series - 1], np.maximum(X[:, a - 1], X[:, b - 1]))

    def as_list(self) -> list[int]:
        return [self.series, *self.parallel]


ALL_ALLOCATIONS = tuple(AllocationSpec(s, (a, b)) for s, a, b in itertools.permutations((1, 2, 3)))


@dataclass(frozen=True)
class SeriesParallelResult:
    weak: ProbEstimate
    strict: ProbEstimate
    weak_count: int
    strict_count: int
    reverse_strict_count: int
    samples: int

    def to_dict(self) -> dict:
        return {
            "weak": self.weak.to_dict(),
            "strict": self.strict.to_dict(),
            "weak_count": self.weak_count,
            "strict_count": self.strict_count,
            "reverse_strict_count": self.reverse_strict_count,
            "samples": self.samples,
        }


def series_parallel_compare(
    dists: Sequence[Distribution],
    alloc_a: AllocationSpec,
    alloc_b: AllocationSpec,
    rng: Rng,
    samples: int,
    cfg: Config = DEFAULT,
) -> SeriesParallelResult:
    """Estimate ``P(L_a >= L_b)`` with common random numbers.

    Each trial draws the three component lifetimes once and evaluates both
    allocations on the same draw, keeping the dependence between the two
    system lifetimes.  Strict counts (``L_a > L_b`` and ``L_b > L_a``) are
    reported alongside.
    """
    if len(dists) != 3:
        raise ValueError("series-parallel system needs exactly three components")
    if samples < 1:
        raise ValueError("samples must be >= 1")

    def count(X):
        la, lb = alloc_a.lifetime(X), alloc_b.lifetime(X)
        return (
            int(np.count_nonzero(la >= lb)),
            int(np.count_nonzero(la > lb)),
            int(np.count_nonzero(lb > la)),
        )

    parts = map_blocks(dists, rng, samples, cfg.mc_block, count, cfg.workers)
    weak = sum(p[0] for p in parts)
    strict = sum(p[1] for p in parts)
    rev = sum(p[2] for p in parts)
    return SeriesParallelResult(
        ProbEstimate.from_counts(weak, samples, rng.seed),
        ProbEstimate.from_counts(strict, samples, rng.seed),
        weak,
        strict,
        rev,
        samples,
    )


def best_allocation_check(
    dists: Sequence[Distribution], rng: Rng, samples: int, cfg: Config = DEFAULT
) -> list[dict]:
    """Compare "largest component in series" against every rival allocation.

    Components are assumed indexed in increasing stochastic order, so
    component 3 goes in series.  Each rival is classed ``cleared`` (Wilson
    lower bound at least 0.5), ``tie`` (interval straddles 0.5) or ``fail``.
    """
    best = AllocationSpec(3, (1, 2))
    out = []
    for i, rival in enumerate(a for a in ALL_ALLOCATIONS if a != best):
        res = series_parallel_compare(dists, best, rival, rng.child(i), samples, cfg)
        lo, hi = res.weak.ci
        status = "cleared" if lo >= 0.5 else ("tie" if hi >= 0.5 else "fail")
        out.append({"rival": rival.as_list(), "status": status, **res.to_dict()})
    return out

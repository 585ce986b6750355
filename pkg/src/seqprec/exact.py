"""Exact ordering probabilities for finite discrete variables, in rationals."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .distributions import Distribution
from .errors import MethodUnsupported


class ChainEnumerator:
    """Dynamic programme over the merged atom values of all variables.

    For a suffix ``(v_k, ..., v_n)`` of a permutation, ``R[i]`` is the
    probability that ``T_{v_k}`` takes the ``i``-th merged value and the rest
    of the suffix follows in order.  Suffix vectors are memoised so a full
    table shares work between permutations that end alike.
    """

    def __init__(self, dists: Sequence[Distribution], strict: bool):
        if not all(d.is_discrete for d in dists):
            raise MethodUnsupported("exact enumeration needs all-discrete variables")
        self.strict = strict
        self.values = sorted({x for d in dists for x, _ in d.atoms})
        index = {x: i for i, x in enumerate(self.values)}
        self.mass = []
        for d in dists:
            row = [Fraction(0)] * len(self.values)
            for x, p in d.atoms:
                row[index[x]] = p
            self.mass.append(row)
        self._memo: dict[tuple[int, ...], list[Fraction]] = {}

    def _suffix(self, suffix: tuple[int, ...]) -> list[Fraction]:
        hit = self._memo.get(suffix)
        if hit is not None:
            return hit
        m = self.mass[suffix[0]]
        if len(suffix) == 1:
            out = list(m)
        else:
            nxt = self._suffix(suffix[1:])
            U = len(nxt)
            out = [Fraction(0)] * U
            tail = Fraction(0)
            # tail = sum_{j >= i} nxt[j] (weak) or sum_{j > i} nxt[j] (strict)
            for i in range(U - 1, -1, -1):
                if not self.strict:
                    tail += nxt[i]
                if m[i]:
                    out[i] = m[i] * tail
                if self.strict:
                    tail += nxt[i]
        self._memo[suffix] = out
        return out

    def probability(self, perm0: Sequence[int]) -> Fraction:
        return sum(self._suffix(tuple(perm0)), Fraction(0))

    def table(self, perms0: Iterable[Sequence[int]]) -> list[Fraction]:
        return [self.probability(p) for p in perms0]


def sp_exact(d1: Distribution, d2: Distribution) -> tuple[Fraction, Fraction]:
    """``(P(T2 >= T1), P(T1 >= T2))`` for two discrete variables."""
    p21 = sum((p1 * p2 for x1, p1 in d1.atoms for x2, p2 in d2.atoms if x2 >= x1), Fraction(0))
    p12 = sum((p1 * p2 for x1, p1 in d1.atoms for x2, p2 in d2.atoms if x1 >= x2), Fraction(0))
    return p21, p12

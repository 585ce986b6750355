"""Permutations of variable indices and their lexicographic ranks.

Public functions take and return 1-based tuples (``(3, 1, 2)`` is the event
``T3 <= T1 <= T2``); the ``*0`` helpers work with 0-based tuples.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable, Sequence

import numpy as np

from .errors import MalformedParameter


def parse_permutation(perm: str | Iterable[int], n: int | None = None) -> tuple[int, ...]:
    """Validate a 1-based permutation given as ``"3,1,2"`` or a sequence."""
    if isinstance(perm, str):
        try:
            perm = [int(p) for p in perm.replace(" ", "").split(",") if p]
        except ValueError as exc:
            raise MalformedParameter(f"cannot parse permutation {perm!r}") from exc
    perm = tuple(int(p) for p in perm)
    m = len(perm) if n is None else n
    if len(perm) != m or sorted(perm) != list(range(1, m + 1)):
        raise MalformedParameter(f"{perm} is not a permutation of 1..{m}")
    return perm


def to0(perm: Sequence[int]) -> tuple[int, ...]:
    return tuple(p - 1 for p in perm)


def to1(perm: Sequence[int]) -> tuple[int, ...]:
    return tuple(int(p) + 1 for p in perm)


def all_permutations0(n: int) -> list[tuple[int, ...]]:
    """All 0-based permutations in lexicographic order."""
    return list(itertools.permutations(range(n)))


def lex_rank0(perm: Sequence[int]) -> int:
    n = len(perm)
    rank = 0
    for i, p in enumerate(perm):
        smaller = sum(1 for q in perm[i + 1 :] if q < p)
        rank += smaller * math.factorial(n - 1 - i)
    return rank


def lex_rank(perm: Sequence[int]) -> int:
    return lex_rank0(to0(perm))


def perm_array0(n: int) -> np.ndarray:
    return np.array(all_permutations0(n), dtype=np.int64).reshape(-1, n)


def swap_positions(perm: Sequence[int], j: int, k: int) -> tuple[int, ...]:
    """Swap 1-based positions ``j`` and ``k``."""
    out = list(perm)
    out[j - 1], out[k - 1] = out[k - 1], out[j - 1]
    return tuple(out)

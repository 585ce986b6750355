"""Permutation-event probabilities and the sequential precedence order.

For variables ``T_1..T_n`` and a permutation ``s`` (1-based), the permutation
event is ``T_{s(1)} <= T_{s(2)} <= ... <= T_{s(n)}``.  The sequence is
SSP-ordered when the identity event is at least as likely as every other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .config import DEFAULT, Config
from .distributions import Distribution
from .errors import MethodUnsupported, TooManyVariables
from .estimates import ProbEstimate
from .exact import ChainEnumerator
from .montecarlo import ordering_counts
from .pairwise_orders import EQUAL, GE, INDETERMINATE, LE, OrderVerdict, check_sp
from .permutations import all_permutations0, lex_rank, parse_permutation, swap_positions, to0, to1
from .quadrature import chain_probabilities
from .rng import Rng

YES, NO = "yes", "no"


def resolve_method(dists: Sequence[Distribution], method: str) -> str:
    discrete = [d.is_discrete for d in dists]
    if method == "auto":
        if all(discrete):
            return "exact"
        if not any(discrete):
            return "quadrature"
        return "monte-carlo"
    if method == "exact" and not all(discrete):
        raise MethodUnsupported("exact permutation probabilities need all-discrete variables")
    if method == "quadrature" and any(discrete):
        raise MethodUnsupported("quadrature permutation probabilities need all-continuous variables")
    if method not in ("exact", "quadrature", "monte-carlo"):
        raise MethodUnsupported(f"unknown method {method!r}")
    return method


def _table_convention(dists, method, cfg):
    if not any(d.is_discrete for d in dists):
        return None
    return cfg.convention if method == "exact" else "strict"


def perm_probability(
    dists: Sequence[Distribution],
    perm,
    method: str = "auto",
    cfg: Config = DEFAULT,
    rng: Rng | None = None,
) -> ProbEstimate:
    """Probability of the ordering event of the 1-based permutation ``perm``.

    Monte Carlo counts strict orderings among ``cfg.samples`` joint draws;
    a table built with the same seed yields the same count for this event.
    """
    perm = parse_permutation(perm, len(dists))
    method = resolve_method(dists, method)
    if method == "exact":
        enum = ChainEnumerator(dists, strict=cfg.convention == "strict")
        return ProbEstimate.from_fraction(enum.probability(to0(perm)))
    if method == "quadrature":
        vals, errs, _ = chain_probabilities(dists, [to0(perm)], cfg)
        return ProbEstimate(float(vals[0]), "quadrature", float(errs[0]))
    rng = rng if rng is not None else Rng(cfg.seed)
    counts, _ = ordering_counts(dists, rng, cfg.samples, cfg.mc_block, cfg.workers)
    return ProbEstimate.from_counts(int(counts[lex_rank(perm)]), cfg.samples, rng.seed)


@dataclass(frozen=True)
class PermProbTable:
    n: int
    perms: tuple[tuple[int, ...], ...]
    estimates: tuple[ProbEstimate, ...]
    method: str
    convention: str | None = None
    ties: int | None = None

    def __getitem__(self, perm) -> ProbEstimate:
        return self.estimates[lex_rank(parse_permutation(perm, self.n))]

    def __iter__(self):
        return iter(zip(self.perms, self.estimates))

    def __len__(self):
        return len(self.perms)

    @property
    def values(self) -> np.ndarray:
        return np.array([e.value for e in self.estimates])

    @property
    def total(self) -> float:
        if self.method == "exact":
            return float(sum(e.exact for e in self.estimates))
        return math.fsum(e.value for e in self.estimates)

    @property
    def total_err(self) -> float:
        """Error allowance for :attr:`total`.

        Quadrature errors add up.  Monte Carlo counts partition the draws, so
        the sum is exact up to the tie fraction and the allowance is the
        Wilson half-width of the sum.
        """
        if self.method == "monte-carlo":
            k = sum(int(round(e.value * e.samples)) for e in self.estimates)
            return ProbEstimate.from_counts(k, self.estimates[0].samples).err
        return math.fsum(e.err for e in self.estimates)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "method": self.method,
            "convention": self.convention,
            "ties": self.ties,
            "total": self.total,
            "entries": [{"perm": list(p), **e.to_dict()} for p, e in self],
        }


def perm_table(
    dists: Sequence[Distribution],
    method: str = "auto",
    cfg: Config = DEFAULT,
    rng: Rng | None = None,
) -> PermProbTable:
    """Probabilities of all ``n!`` permutation events in lexicographic order."""
    n = len(dists)
    if n > cfg.n_cap:
        raise TooManyVariables(f"{n} variables exceeds the permutation cap {cfg.n_cap} ({math.factorial(n)} events)")
    method = resolve_method(dists, method)
    perms0 = all_permutations0(n)
    perms = tuple(to1(p) for p in perms0)
    conv = _table_convention(dists, method, cfg)
    ties = None
    if method == "exact":
        enum = ChainEnumerator(dists, strict=cfg.convention == "strict")
        ests = tuple(ProbEstimate.from_fraction(p) for p in enum.table(perms0))
    elif method == "quadrature":
        vals, errs, _ = chain_probabilities(dists, perms0, cfg)
        ests = tuple(ProbEstimate(float(v), "quadrature", float(e)) for v, e in zip(vals, errs))
    else:
        rng = rng if rng is not None else Rng(cfg.seed)
        counts, ties = ordering_counts(dists, rng, cfg.samples, cfg.mc_block, cfg.workers)
        ests = tuple(ProbEstimate.from_counts(int(c), cfg.samples, rng.seed) for c in counts)
    return PermProbTable(n, perms, ests, method, conv, ties)


def _gap(a: ProbEstimate, b: ProbEstimate):
    if a.exact is not None and b.exact is not None:
        return float(a.exact - b.exact), (a.exact > b.exact) - (a.exact < b.exact)
    d = a.value - b.value
    return d, (d > 0) - (d < 0)


def ssp_verdict(target: ProbEstimate, rival: ProbEstimate, guard_factor: float):
    """``(verdict, margin, guard)`` for target versus the strongest rival."""
    margin, sign = _gap(target, rival)
    guard = guard_factor * (target.err + rival.err)
    if guard == 0:
        return (YES if sign >= 0 else NO), margin, guard
    if margin >= guard:
        return YES, margin, guard
    if margin <= -guard:
        return NO, margin, guard
    return INDETERMINATE, margin, guard


@dataclass(frozen=True)
class SspReport:
    table: PermProbTable
    target: tuple[int, ...]
    ssp_holds: str
    argmax: list
    margin: float
    guard: float
    csp_holds: str
    adjacent: list = field(default_factory=list)
    pairwise: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "target": list(self.target),
            "ssp_holds": self.ssp_holds,
            "argmax": [list(p) for p in self.argmax],
            "margin": self.margin,
            "guard": self.guard,
            "csp_holds": self.csp_holds,
            "adjacent_sp": [v.to_dict() for v in self.adjacent],
            "pairwise_sp": {k: v.to_dict() for k, v in self.pairwise.items()},
            "table": self.table.to_dict(),
        }


def chain_verdict(verdicts: Sequence[OrderVerdict]) -> str:
    """``yes`` when every verdict has ``T1`` below ``T2``."""
    if any(v.direction not in (LE, EQUAL, INDETERMINATE) for v in verdicts):
        return NO
    if any(v.direction == INDETERMINATE for v in verdicts):
        return INDETERMINATE
    return YES


def _sp_method(table_method: str) -> str:
    return "monte-carlo" if table_method == "monte-carlo" else "auto"


def pairwise_sp(dists, method: str, cfg: Config = DEFAULT, rng: Rng | None = None) -> dict:
    """``check_sp(T_i, T_j)`` for all ``i < j``, keyed ``"i<j"`` (1-based)."""
    out = {}
    n = len(dists)
    for i in range(n):
        for j in range(i + 1, n):
            sub = None if rng is None else rng.child(i * n + j)
            out[f"{i + 1}<{j + 1}"] = check_sp(dists[i], dists[j], method, cfg, sub)
    return out


def check_ssp(
    dists: Sequence[Distribution],
    cfg: Config = DEFAULT,
    method: str | None = None,
    target=None,
    table: PermProbTable | None = None,
) -> SspReport:
    """SSP verdict for ``target`` (identity by default) plus the CSP chain."""
    n = len(dists)
    table = table if table is not None else perm_table(dists, method or cfg.method, cfg)
    target = parse_permutation(target, n) if target is not None else tuple(range(1, n + 1))
    t_est = table[target]
    if n == 1:
        return SspReport(table, target, YES, [target], 0.0, 0.0, YES)
    rivals = [(p, e) for p, e in table if p != target]
    best_p, best = max(rivals, key=lambda pe: pe[1].exact if pe[1].exact is not None else pe[1].value)
    verdict, margin, guard = ssp_verdict(t_est, best, cfg.guard_factor)

    top_p, top = max(table, key=lambda pe: pe[1].exact if pe[1].exact is not None else pe[1].value)
    argmax = []
    for p, e in table:
        gap, sign = _gap(top, e)
        g = cfg.guard_factor * (top.err + e.err)
        if (g == 0 and sign == 0) or (g > 0 and gap < g) or p == top_p:
            argmax.append(p)

    sp_method = _sp_method(table.method)
    sp_rng = Rng(cfg.seed).child(1) if sp_method == "monte-carlo" else None
    pw = pairwise_sp(dists, sp_method, cfg, sp_rng)
    adjacent = [pw[f"{i + 1}<{i + 2}"] for i in range(n - 1)]
    return SspReport(table, target, verdict, argmax, margin, guard, chain_verdict(adjacent), adjacent, pw)


@dataclass(frozen=True)
class TranspositionResult:
    perm: tuple[int, ...]
    j: int
    k: int
    p_perm: ProbEstimate
    p_swapped: ProbEstimate
    holds: bool
    reversed: bool

    def to_dict(self) -> dict:
        return {
            "perm": list(self.perm),
            "j": self.j,
            "k": self.k,
            "p_perm": self.p_perm.to_dict(),
            "p_swapped": self.p_swapped.to_dict(),
            "holds": self.holds,
            "reversed": self.reversed,
        }


def transposition_compare(
    dists: Sequence[Distribution],
    perm,
    j: int,
    k: int,
    method: str = "auto",
    cfg: Config = DEFAULT,
    table: PermProbTable | None = None,
) -> TranspositionResult:
    """Compare ``perm`` with the permutation whose positions ``j < k`` are swapped.

    With ``perm[j] < perm[k]`` (smaller index earlier) the expectation is
    ``P(perm) >= P(swapped)``.  In the opposite orientation the roles are
    exchanged and ``reversed`` is set.
    """
    n = len(dists)
    perm = parse_permutation(perm, n)
    if not 1 <= j < k <= n:
        raise ValueError(f"need 1 <= j < k <= {n}, got j={j}, k={k}")
    swapped = swap_positions(perm, j, k)
    if table is not None:
        a, b = table[perm], table[swapped]
    else:
        a = perm_probability(dists, perm, method, cfg)
        b = perm_probability(dists, swapped, method, cfg)
    rev = perm[j - 1] > perm[k - 1]
    hi, lo = (b, a) if rev else (a, b)
    gap, sign = _gap(hi, lo)
    guard = cfg.guard_factor * (a.err + b.err)
    holds = sign >= 0 if guard == 0 else gap >= -guard
    return TranspositionResult(perm, j, k, a, b, bool(holds), rev)

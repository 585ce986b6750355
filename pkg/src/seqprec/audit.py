"""Numerical audits of ordering claims and randomized counterexample search.

Claims
------
``lemma-2.1``
    In an lr-ordered chain, swapping two positions so the smaller-indexed
    variable moves later never increases the event probability.
``theorem-2.1``
    An lr-ordered chain is SSP-ordered.
``theorem-2.2``
    If a permutation event is SSP-maximal, every pair of variables is SP
    ordered as in that permutation.
``corollary-2.1``
    As ``theorem-2.2`` restricted to adjacent positions (the CSP chain).
``example-2.1``
    With ``T2 <=_hr T3``, ``P(T1 <= T2 <= T3) >= P(T1 <= T3 <= T2)``.
``sp-transitivity``
    SP is transitive over every triple (known to fail).

Every ``no`` verdict carries witnesses holding the probabilities involved.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .config import DEFAULT, Config
from .distributions import Distribution, discrete, exponential, weibull
from .errors import PreconditionNotEstablished
from .pairwise_orders import EQUAL, GE, INDETERMINATE, LE, check_hr, check_lr
from .sequence_orders import NO, YES, check_ssp, pairwise_sp, perm_table, resolve_method, transposition_compare
from .rng import Rng

CLAIMS = ("lemma-2.1", "theorem-2.1", "theorem-2.2", "corollary-2.1", "example-2.1", "sp-transitivity")


@dataclass(frozen=True)
class AuditReport:
    claim: str
    instance: list
    holds: str
    witnesses: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "claim": self.claim,
            "instance": self.instance,
            "holds": self.holds,
            "witnesses": self.witnesses,
            "details": self.details,
        }


def _combine(verdicts: Sequence[str]) -> str:
    if NO in verdicts:
        return NO
    if INDETERMINATE in verdicts:
        return INDETERMINATE
    return YES


def certify_lr_chain(dists: Sequence[Distribution], cfg: Config = DEFAULT) -> list:
    """Check ``T_i <=_lr T_{i+1}`` for adjacent pairs; raise if not certified."""
    verdicts = []
    for i in range(len(dists) - 1):
        v = check_lr(dists[i], dists[i + 1], cfg)
        if not v.le:
            raise PreconditionNotEstablished(
                f"lr chain not certified: T{i + 1} vs T{i + 2} is {v.direction} (margin {v.margin:.3g})"
            )
        verdicts.append(v)
    return verdicts


def _instance(dists):
    return [d.to_dict() for d in dists]


def _audit_transpositions(dists, cfg, budget, rng):
    certify_lr_chain(dists, cfg)
    table = perm_table(dists, cfg.method, cfg)
    n = len(dists)
    cases = [
        (p, j, k)
        for p in table.perms
        for j, k in itertools.combinations(range(1, n + 1), 2)
        if p[j - 1] < p[k - 1]
    ]
    if budget is not None and len(cases) > budget:
        gen = (rng or Rng(cfg.seed)).generator()
        idx = np.sort(gen.choice(len(cases), size=budget, replace=False))
        cases = [cases[i] for i in idx]
    witnesses = []
    for p, j, k in cases:
        r = transposition_compare(dists, p, j, k, cfg=cfg, table=table)
        if not r.holds:
            witnesses.append(r.to_dict())
    holds = NO if witnesses else YES
    return holds, witnesses, {"transpositions": len(cases), "method": table.method}


def _audit_lr_chain_ssp(dists, cfg):
    certify_lr_chain(dists, cfg)
    rep = check_ssp(dists, cfg)
    witnesses = []
    if rep.ssp_holds != YES:
        witnesses.append({"target": list(rep.target), "argmax": [list(p) for p in rep.argmax], "margin": rep.margin})
    return rep.ssp_holds, witnesses, {"margin": rep.margin, "guard": rep.guard, "method": rep.table.method}


def _conventions(dists):
    return ("strict", "weak") if any(d.is_discrete for d in dists) else (None,)


def _audit_ssp_implies_sp(dists, cfg, target, adjacent_only: bool):
    """Shared body of theorem-2.2 and corollary-2.1, run under every tie convention."""
    n = len(dists)
    verdicts, witnesses, findings = [], [], []
    for conv in _conventions(dists):
        c = cfg if conv is None else cfg.with_(convention=conv)
        table = perm_table(dists, c.method, c)
        probe = check_ssp(dists, c, table=table)
        t = tuple(target) if target is not None else (probe.target if probe.ssp_holds == YES else probe.argmax[0])
        rep = check_ssp(dists, c, target=t, table=table)
        finding = {"convention": conv, "target": list(t), "ssp_holds": rep.ssp_holds, "margin": rep.margin}
        findings.append(finding)
        if rep.ssp_holds != YES:
            continue
        positions = (
            [(a, a + 1) for a in range(n - 1)] if adjacent_only else list(itertools.combinations(range(n), 2))
        )
        for a, b in positions:
            i, j = t[a], t[b]
            lo, hi = min(i, j), max(i, j)
            v = rep.pairwise[f"{lo}<{hi}"]
            # verdict is for (T_lo, T_hi); orient it as (T_i earlier, T_j later)
            direction = v.direction if i < j else {LE: GE, GE: LE}.get(v.direction, v.direction)
            p_hi_ge_lo = v.details["p21"]["value"]
            p_lo_ge_hi = v.details["p12"]["value"]
            p_later, p_earlier = (p_hi_ge_lo, p_lo_ge_hi) if i < j else (p_lo_ge_hi, p_hi_ge_lo)
            if direction == GE:
                verdicts.append(NO)
                witnesses.append(
                    {
                        "convention": conv,
                        "target": list(t),
                        "pair": [i, j],
                        "statement": f"T{i} <=_sp T{j}",
                        f"P(T{j}>=T{i})": p_later,
                        f"P(T{i}>=T{j})": p_earlier,
                        "target_probability": rep.table[t].value,
                    }
                )
            elif direction == INDETERMINATE:
                verdicts.append(INDETERMINATE)
            else:
                verdicts.append(YES)
    if not verdicts:
        raise PreconditionNotEstablished(
            "no SSP-maximal target permutation under any tie convention: " + repr(findings)
        )
    return _combine(verdicts), witnesses, {"findings": findings}


def _audit_last_pair_hr(dists, cfg, any_n: bool):
    n = len(dists)
    if n != 3 and not any_n:
        raise PreconditionNotEstablished(f"example-2.1 is stated for n = 3, got n = {n}")
    if n < 2:
        raise PreconditionNotEstablished("need at least two variables")
    hr = check_hr(dists[n - 2], dists[n - 1], cfg)
    if not hr.le:
        raise PreconditionNotEstablished(f"T{n - 1} <=_hr T{n} not certified ({hr.direction})")
    ident = tuple(range(1, n + 1))
    r = transposition_compare(dists, ident, n - 1, n, cfg.method, cfg)
    holds = YES if r.holds else NO
    return holds, ([] if r.holds else [r.to_dict()]), {"comparison": r.to_dict()}


def _audit_sp_transitivity(dists, cfg):
    method = resolve_method(dists, cfg.method)
    pw = pairwise_sp(dists, "monte-carlo" if method == "monte-carlo" else "auto", cfg)
    n = len(dists)

    def below(i, j):
        """Direction of ``T_i`` versus ``T_j``: LE, GE, EQUAL or INDETERMINATE."""
        if i < j:
            return pw[f"{i + 1}<{j + 1}"].direction
        return {LE: GE, GE: LE}.get(pw[f"{j + 1}<{i + 1}"].direction, pw[f"{j + 1}<{i + 1}"].direction)

    def prob(i, j):
        """``P(T_j >= T_i)``."""
        if i < j:
            return pw[f"{i + 1}<{j + 1}"].details["p21"]["value"]
        return pw[f"{j + 1}<{i + 1}"].details["p12"]["value"]

    witnesses, undecided = [], False
    for i, j, k in itertools.permutations(range(n), 3):
        if below(i, j) == LE and below(j, k) == LE:
            ik = below(i, k)
            if ik == INDETERMINATE:
                undecided = True
            elif ik != LE:
                witnesses.append(
                    {
                        "chain": [i + 1, j + 1, k + 1],
                        "cycle": ik == GE,
                        f"P(T{j + 1}>=T{i + 1})": prob(i, j),
                        f"P(T{k + 1}>=T{j + 1})": prob(j, k),
                        f"P(T{k + 1}>=T{i + 1})": prob(i, k),
                    }
                )
    holds = NO if witnesses else (INDETERMINATE if undecided else YES)
    return holds, witnesses, {"pairwise_sp": {k: v.direction for k, v in pw.items()}}


def audit_claim(
    claim: str,
    dists: Sequence[Distribution],
    cfg: Config = DEFAULT,
    *,
    target=None,
    budget: int | None = None,
    rng: Rng | None = None,
    any_n: bool = False,
) -> AuditReport:
    """Run the audit for ``claim`` on one instance.

    Raises :class:`PreconditionNotEstablished` when the claim's hypothesis
    (lr chain, hr pair, an SSP-maximal target) cannot be certified.
    """
    if claim == "lemma-2.1":
        holds, wit, det = _audit_transpositions(dists, cfg, budget, rng)
    elif claim == "theorem-2.1":
        holds, wit, det = _audit_lr_chain_ssp(dists, cfg)
    elif claim == "theorem-2.2":
        holds, wit, det = _audit_ssp_implies_sp(dists, cfg, target, adjacent_only=False)
    elif claim == "corollary-2.1":
        holds, wit, det = _audit_ssp_implies_sp(dists, cfg, target, adjacent_only=True)
    elif claim == "example-2.1":
        holds, wit, det = _audit_last_pair_hr(dists, cfg, any_n)
    elif claim == "sp-transitivity":
        holds, wit, det = _audit_sp_transitivity(dists, cfg)
    else:
        raise ValueError(f"unknown claim {claim!r}; expected one of {CLAIMS}")
    return AuditReport(claim, _instance(dists), holds, wit, det)


# --- random instance spaces -----------------------------------------------


@dataclass(frozen=True)
class FamilySpace:
    """Recipe for random instances.

    ``kind`` is one of ``discrete`` (integer atoms in ``[lo, hi]``, masses on
    a ``1/mass_units`` lattice), ``exponential`` (free log-uniform rates),
    ``exponential-chain`` (rates sorted decreasing, so lr-ordered),
    ``weibull-chain`` (common shape, scales sorted increasing) or ``iid``.
    """

    kind: str = "discrete"
    n: int = 3
    max_atoms: int = 2
    lo: int = 1
    hi: int = 6
    mass_units: int = 10
    rate_range: tuple[float, float] = (0.2, 5.0)
    shape_range: tuple[float, float] = (0.5, 3.0)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> FamilySpace:
        d = dict(d)
        for key in ("rate_range", "shape_range"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}

    def draw(self, rng: Rng) -> list[Distribution]:
        gen = rng.generator()
        n = self.n
        if self.kind == "discrete":
            out = []
            for i in range(n):
                k = int(gen.integers(1, min(self.max_atoms, self.hi - self.lo + 1, self.mass_units) + 1))
                xs = np.sort(gen.choice(np.arange(self.lo, self.hi + 1), size=k, replace=False))
                cuts = np.sort(gen.choice(np.arange(1, self.mass_units), size=k - 1, replace=False))
                units = np.diff(np.concatenate(([0], cuts, [self.mass_units])))
                out.append(discrete([(float(x), f"{u}/{self.mass_units}") for x, u in zip(xs, units)], name=f"T{i + 1}"))
            return out
        lo, hi = (math.log(v) for v in self.rate_range)
        rates = np.exp(gen.uniform(lo, hi, size=n))
        if self.kind == "exponential":
            return [exponential(float(r), name=f"T{i + 1}") for i, r in enumerate(rates)]
        if self.kind == "exponential-chain":
            return [exponential(float(r), name=f"T{i + 1}") for i, r in enumerate(np.sort(rates)[::-1])]
        if self.kind == "weibull-chain":
            shape = float(gen.uniform(*self.shape_range))
            scales = np.sort(1.0 / rates)
            return [weibull(shape, float(s), name=f"T{i + 1}") for i, s in enumerate(scales)]
        if self.kind == "iid":
            return [exponential(float(rates[0]), name=f"T{i + 1}") for i in range(n)]
        raise ValueError(f"unknown family space kind {self.kind!r}")


def search_counterexample(
    claim: str,
    space: FamilySpace,
    budget: int,
    seed: int = 0,
    cfg: Config = DEFAULT,
) -> AuditReport | None:
    """Audit ``budget`` random instances; return the first violation found.

    Instance ``i`` is drawn from ``Rng(seed).child(i)``, so any hit can be
    regenerated from ``(space, seed, i)`` as well as from its embedded
    instance.  Instances whose hypothesis cannot be certified are skipped.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    root = Rng(seed)
    skipped = 0
    for i in range(budget):
        dists = space.draw(root.child(i))
        try:
            rep = audit_claim(claim, dists, cfg, rng=root.child(i).child(1))
        except PreconditionNotEstablished:
            skipped += 1
            continue
        if rep.holds == NO:
            details = dict(rep.details, seed=seed, instance_index=i, skipped=skipped, space=space.to_dict())
            return AuditReport(rep.claim, rep.instance, rep.holds, rep.witnesses, details)
    return None

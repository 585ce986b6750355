"""Pairwise stochastic orders: likelihood ratio, hazard rate, usual, precedence.

The lr/hr/st checks scan a shared grid for monotonicity or dominance failures.
A failure is measured as the worst cumulative drawdown of the relevant (log)
ratio, so a slow monotone drift below float noise per step cannot hide a large
overall decrease.  For every relation the two orientations are tested
separately:

* ``up``   - worst violation of ``T1 <= T2``
* ``down`` - worst violation of ``T2 <= T1``

A violation at most ``cfg.slack`` counts as satisfied, above ``cfg.gray`` as
failed, and anything in between makes the verdict indeterminate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, Config
from .distributions import Distribution
from .errors import DegenerateSupport, MethodUnsupported
from .estimates import ProbEstimate
from .exact import sp_exact
from .montecarlo import pair_counts
from .quadrature import chain_probabilities, support_bounds
from .rng import Rng

LE = "T1<=T2"
GE = "T2<=T1"
EQUAL = "equal"
INCOMPARABLE = "incomparable"
INDETERMINATE = "indeterminate"

MAX_WITNESSES = 5


@dataclass(frozen=True)
class OrderVerdict:
    relation: str
    direction: str
    margin: float
    diagnostics: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def le(self) -> bool:
        """``T1`` is below ``T2`` (strictly or as an equality)."""
        return self.direction in (LE, EQUAL)

    @property
    def ge(self) -> bool:
        return self.direction in (GE, EQUAL)

    def to_dict(self) -> dict:
        return {
            "relation": self.relation,
            "direction": self.direction,
            "margin": self.margin,
            "diagnostics": [{"t": t, "violation": v} for t, v in self.diagnostics],
            "details": self.details,
        }


# --- grid scans ------------------------------------------------------------


def scan_points(d1: Distribution, d2: Distribution, cfg: Config = DEFAULT) -> np.ndarray:
    """Evaluation points spanning both (truncated) supports, including every atom."""
    pts = []
    cont = [d for d in (d1, d2) if not d.is_discrete]
    if cont:
        lo, hi = support_bounds(cont, cfg.tail)
        pts.append(np.linspace(lo, hi, cfg.check_grid // 2))
        q = np.linspace(cfg.tail, 1.0 - cfg.tail, cfg.check_grid // 4)
        pts.extend(d.quantile(q) for d in cont)
    for d in (d1, d2):
        if d.is_discrete:
            pts.append(d.values)
    allp = np.unique(np.concatenate(pts))
    if len(cont) == 2:
        return allp
    # a point below every atom, where both survival functions are still 1
    return np.concatenate(([allp[0] - 1.0], allp))


def _drawdown(t: np.ndarray, r: np.ndarray):
    """Worst ``r_i - r_j`` over ``i < j``, and the points where it is attained."""
    if len(r) < 2:
        return 0.0, []
    peak = np.maximum.accumulate(r)
    with np.errstate(invalid="ignore"):
        dd = peak - r
    dd = np.where(np.isnan(dd), 0.0, dd)
    worst = float(np.max(dd))
    idx = np.argsort(dd)[::-1][:MAX_WITNESSES]
    wit = [(float(t[i]), float(dd[i])) for i in idx if dd[i] > 0]
    return worst, wit


def _decide(relation, up, down, wit_up, wit_down, cfg: Config, details=None) -> OrderVerdict:
    details = dict(details or {})
    details.update(violation_up=up, violation_down=down)
    gray = [v for v in (up, down) if cfg.slack < v <= cfg.gray]
    if gray:
        return OrderVerdict(relation, INDETERMINATE, min(gray), wit_up + wit_down, details)
    up_ok, down_ok = up <= cfg.slack, down <= cfg.slack
    if up_ok and down_ok:
        return OrderVerdict(relation, EQUAL, max(up, down), [], details)
    if up_ok:
        return OrderVerdict(relation, LE, down, wit_down, details)
    if down_ok:
        return OrderVerdict(relation, GE, up, wit_up, details)
    return OrderVerdict(relation, INCOMPARABLE, min(up, down), wit_up + wit_down, details)


def _oriented(t, num, den):
    """Drawdown of ``num - den`` (log ratio) where ``den`` is finite."""
    keep = den > -np.inf
    with np.errstate(invalid="ignore"):
        r = num[keep] - den[keep]
    r = np.where(np.isnan(r), 0.0, r)
    return _drawdown(t[keep], r)


def check_lr(d1: Distribution, d2: Distribution, cfg: Config = DEFAULT) -> OrderVerdict:
    """Is ``f2 / f1`` monotone over the union of the supports?"""
    if d1.is_discrete != d2.is_discrete:
        raise MethodUnsupported("lr order between a density and a mass function is undefined")
    t = scan_points(d1, d2, cfg)
    l1, l2 = d1.logpdf(t), d2.logpdf(t)
    live = (l1 > -np.inf) | (l2 > -np.inf)
    if not live.any():
        raise DegenerateSupport("both densities vanish on the whole grid")
    t, l1, l2 = t[live], l1[live], l2[live]
    # f1 = 0 < f2 is ratio +inf; the ratio stays defined with inf arithmetic
    with np.errstate(invalid="ignore"):
        r = l2 - l1
    up, wu = _drawdown(t, np.where(np.isnan(r), 0.0, r))
    down, wd = _drawdown(t, np.where(np.isnan(r), 0.0, -r))
    return _decide("lr", up, down, wu, wd, cfg, {"points": int(len(t))})


def check_hr(d1: Distribution, d2: Distribution, cfg: Config = DEFAULT, route: str = "ratio") -> OrderVerdict:
    """Hazard rate order.

    ``route="ratio"`` tests that ``sf2 / sf1`` is nondecreasing where
    ``sf1 > 0`` (and the converse where ``sf2 > 0``).  ``route="hazard"``
    compares the hazard functions pointwise and needs continuous variables.
    """
    t = scan_points(d1, d2, cfg)
    if route == "ratio":
        s1, s2 = d1.logsf(t), d2.logsf(t)
        up, wu = _oriented(t, s2, s1)
        down, wd = _oriented(t, s1, s2)
    elif route == "hazard":
        if d1.is_discrete or d2.is_discrete:
            raise MethodUnsupported("hazard route needs continuous variables")
        up, wu = _hazard_drawdown(d1, d2, t)
        down, wd = _hazard_drawdown(d2, d1, t)
    else:
        raise ValueError(f"unknown route {route!r}")
    return _decide("hr", up, down, wu, wd, cfg, {"route": route})


def _hazards(d: Distribution, t: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        h = np.exp(d.logpdf(t) - d.logsf(t))
    return np.where(d.sf(t) > 0, h, np.nan)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(6)


def _hazard_drawdown(d1, d2, t):
    """Drawdown of the running integral of ``h1 - h2`` where ``sf1 > 0``.

    The integral tracks ``log(sf2 / sf1)``, so the violation lives on the same
    scale as the ratio route.  Each cell is integrated by 6-point
    Gauss-Legendre; cells with an endpoint outside both supports are skipped.
    """
    h1, h2 = _hazards(d1, t), _hazards(d2, t)
    keep = ~np.isnan(h1)
    t, h1, h2 = t[keep], h1[keep], h2[keep]
    bad = np.isnan(h2) | np.isinf(h2)
    if np.any(bad):
        # sf2 vanished while sf1 is still positive
        return math.inf, [(float(x), math.inf) for x in t[bad][:MAX_WITNESSES]]
    inside = (h1 > 0) | (h2 > 0) | (d1.pdf(t) > 0) | (d2.pdf(t) > 0)
    cell = inside[:-1] & inside[1:] & np.isfinite(h1[:-1]) & np.isfinite(h1[1:])
    a, b = t[:-1][cell], t[1:][cell]
    half = 0.5 * (b - a)
    x = (0.5 * (a + b))[:, None] + half[:, None] * _GL_X[None, :]
    g = np.nan_to_num(_hazards(d1, x) - _hazards(d2, x), nan=0.0)
    steps = np.zeros(len(t) - 1)
    steps[cell] = half * (g @ _GL_W)
    return _drawdown(t, np.concatenate(([0.0], np.cumsum(steps))))


def _pointwise(t, excess):
    if len(excess) == 0:
        return 0.0, []
    worst = max(0.0, float(np.max(excess)))
    idx = np.argsort(excess)[::-1][:MAX_WITNESSES]
    return worst, [(float(t[i]), float(excess[i])) for i in idx if excess[i] > 0]


def check_st(d1: Distribution, d2: Distribution, cfg: Config = DEFAULT) -> OrderVerdict:
    """``sf1(t) <= sf2(t)`` for every grid ``t``."""
    t = scan_points(d1, d2, cfg)
    s1, s2 = d1.sf(t), d2.sf(t)
    up, wu = _pointwise(t, s1 - s2)
    down, wd = _pointwise(t, s2 - s1)
    return _decide("st", up, down, wu, wd, cfg)


# --- stochastic precedence ------------------------------------------------


def resolve_sp_method(d1: Distribution, d2: Distribution, method: str) -> str:
    both_discrete = d1.is_discrete and d2.is_discrete
    both_exp = d1.family == "exponential" and d2.family == "exponential"
    if method == "auto":
        return "exact" if (both_discrete or both_exp) else "quadrature"
    if method == "exact" and not (both_discrete or both_exp):
        raise MethodUnsupported("exact SP needs two discrete or two exponential variables")
    if method == "quadrature" and both_discrete:
        raise MethodUnsupported("quadrature SP needs at least one continuous variable")
    if method not in ("exact", "quadrature", "monte-carlo"):
        raise MethodUnsupported(f"unknown method {method!r}")
    return method


def _sp_both(d1, d2, method, cfg, rng):
    """``(P(T2 >= T1), P(T1 >= T2))``; the second is ``None`` when ties are null."""
    method = resolve_sp_method(d1, d2, method)
    if method == "monte-carlo":
        rng = rng if rng is not None else Rng(cfg.seed)
        k21, k12 = pair_counts(d1, d2, rng, cfg.samples, cfg.mc_block, cfg.workers)
        return (
            ProbEstimate.from_counts(k21, cfg.samples, rng.seed),
            ProbEstimate.from_counts(k12, cfg.samples, rng.seed),
        )
    if method == "exact":
        if d1.is_discrete:
            p21, p12 = sp_exact(d1, d2)
            return ProbEstimate.from_fraction(p21), ProbEstimate.from_fraction(p12)
        l1, l2 = d1.params[0], d2.params[0]
        return ProbEstimate(l1 / (l1 + l2), "exact"), None
    if d1.is_discrete or d2.is_discrete:
        # one side atomic: the outer integral is a finite sum
        if d2.is_discrete:
            terms = d2.masses * d1.cdf(d2.values)
        else:
            terms = d1.masses * d2.sf(d1.values)
        v = float(math.fsum(terms))
        return ProbEstimate(min(1.0, v), "quadrature", float(4 * np.finfo(float).eps * len(terms))), None
    vals, errs, _ = chain_probabilities([d1, d2], [[0, 1]], cfg)
    return ProbEstimate(float(vals[0]), "quadrature", float(errs[0])), None


def sp_probability(
    d1: Distribution, d2: Distribution, method: str = "auto", cfg: Config = DEFAULT, rng: Rng | None = None
) -> ProbEstimate:
    """``P(T2 >= T1)`` by exact summation, quadrature or Monte Carlo."""
    return _sp_both(d1, d2, method, cfg, rng)[0]


def check_sp(
    d1: Distribution, d2: Distribution, method: str = "auto", cfg: Config = DEFAULT, rng: Rng | None = None
) -> OrderVerdict:
    """Stochastic precedence: compare ``P(T2 >= T1)`` with ``P(T1 >= T2)``.

    Ties count on both sides.  When they have probability zero this is the
    ``0.5`` threshold and the margin is ``|P - 0.5|``; for two discrete
    variables the margin is ``|P21 - P12|``.  The verdict is indeterminate
    when the margin is within ``guard_factor`` times the method error, except
    for identical distributions, which are ``equal`` by exchangeability.
    """
    e21, e12 = _sp_both(d1, d2, method, cfg, rng)
    if e12 is None:
        p21, p12 = e21.value, 1.0 - e21.value
        margin, err = abs(p21 - 0.5), e21.err
    else:
        p21, p12 = e21.value, e12.value
        margin = abs(p21 - p12)
        err = e21.err + e12.err
        if e21.exact is not None:
            margin = float(abs(e21.exact - e12.exact))
    guard = cfg.guard_factor * err
    if e12 is None:
        e12 = ProbEstimate(p12, e21.method, e21.err, e21.samples, e21.seed)
    details = {"p21": e21.to_dict(), "p12": e12.to_dict(), "guard": guard}
    if d1 == d2:
        direction = EQUAL
    elif margin > guard:
        direction = LE if p21 > p12 else GE
    elif err == 0 and margin == 0:
        direction = EQUAL
    else:
        direction = INDETERMINATE
    return OrderVerdict("sp", direction, margin, [], details)


def check_order(relation: str, d1: Distribution, d2: Distribution, cfg: Config = DEFAULT, **kw) -> OrderVerdict:
    if relation == "lr":
        return check_lr(d1, d2, cfg)
    if relation == "hr":
        return check_hr(d1, d2, cfg, route=kw.get("route", "ratio"))
    if relation == "st":
        return check_st(d1, d2, cfg)
    if relation == "sp":
        return check_sp(d1, d2, kw.get("method", cfg.method), cfg, kw.get("rng"))
    raise ValueError(f"unknown relation {relation!r}")

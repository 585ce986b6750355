import math
from fractions import Fraction

import numpy as np
import pytest

from seqprec import distributions as D
from seqprec.config import Config
from seqprec.errors import MethodUnsupported
from seqprec.exact import sp_exact
from seqprec.pairwise_orders import (
    EQUAL, GE, INCOMPARABLE, INDETERMINATE, LE,
    check_hr, check_lr, check_order, check_sp, check_st, sp_probability,
)
from seqprec.rng import Rng


def random_pair(rng: np.random.Generator):
    kind = rng.integers(4)
    if kind == 0:
        return D.exponential(rng.uniform(0.2, 5)), D.exponential(rng.uniform(0.2, 5))
    if kind == 1:
        k = rng.uniform(0.5, 3)
        return D.weibull(k, rng.uniform(0.3, 3)), D.weibull(k, rng.uniform(0.3, 3))
    if kind == 2:
        return D.weibull(rng.uniform(0.5, 3), rng.uniform(0.3, 3)), D.weibull(rng.uniform(0.5, 3), rng.uniform(0.3, 3))
    return D.gamma(rng.uniform(0.5, 4), rng.uniform(0.3, 3)), D.gamma(rng.uniform(0.5, 4), rng.uniform(0.3, 3))


# --- documented examples ----------------------------------------------------


@pytest.mark.parametrize("rel", ["lr", "hr", "st"])
def test_exponential_orders(rel):
    assert check_order(rel, D.exponential(3.0), D.exponential(2.0)).direction == LE
    assert check_order(rel, D.exponential(2.0), D.exponential(3.0)).direction == GE


@pytest.mark.parametrize("rel", ["lr", "hr", "st", "sp"])
def test_identical_is_equal(rel):
    d = D.weibull(1.7, 2.0)
    assert check_order(rel, d, d).direction == EQUAL


def test_weibull_lr_incomparable_dense_scan():
    a, b = D.weibull(0.5, 1.0), D.weibull(2.0, 1.0)
    t = np.linspace(1e-4, 4, 200_000)
    logr = b.logpdf(t) - a.logpdf(t)
    d = np.diff(logr)
    # the log-ratio rises and then falls: an interior maximum
    assert d.max() > 0 and d.min() < 0
    assert check_lr(a, b).direction == INCOMPARABLE


@pytest.mark.parametrize("route", ["ratio", "hazard"])
def test_weibull_hr_incomparable(route):
    a, b = D.weibull(0.5, 1.0), D.weibull(2.0, 1.0)
    t = np.linspace(1e-3, 3, 10_000)
    ha, hb = 0.5 * t**-0.5, 2 * t
    assert (ha > hb).any() and (ha < hb).any()
    assert check_hr(a, b, route=route).direction == INCOMPARABLE


def test_blyth_st_incomparable(blyth):
    t1, t2, _ = blyth
    # sf1(2) = 1 > sf2(2) = 0.6 ; sf1(3.5) = 0 < sf2(3.5) = 0.6
    assert t1.sf(2.0) > t2.sf(2.0) and t1.sf(3.5) < t2.sf(3.5)
    assert check_st(t1, t2).direction == INCOMPARABLE


def test_sp_exponential_closed_form():
    p = sp_probability(D.exponential(2.0), D.exponential(1.0))
    assert p.value == pytest.approx(2 / 3, abs=1e-15) and p.err == 0
    v = check_sp(D.exponential(2.0), D.exponential(1.0))
    assert v.direction == LE and v.margin == pytest.approx(1 / 6, abs=1e-15)


def test_sp_blyth_pairs(blyth):
    t1, t2, t3 = blyth
    assert check_sp(t1, t2).direction == LE
    assert check_sp(t2, t3).direction == LE
    assert check_sp(t3, t1).direction == LE
    p21, p12 = sp_exact(t3, t1)
    assert (p21, p12) == (Fraction(3, 5), Fraction(2, 5))


def test_lr_mixed_kinds_unsupported(blyth):
    with pytest.raises(MethodUnsupported):
        check_lr(blyth[0], D.exponential(1.0))


def test_sp_methods_unsupported(blyth):
    with pytest.raises(MethodUnsupported):
        sp_probability(D.weibull(1, 1), D.exponential(1), "exact")
    with pytest.raises(MethodUnsupported):
        sp_probability(blyth[0], blyth[1], "quadrature")


def test_lr_infinite_ratio_region():
    # T2 has support extending past T1's; f2/f1 is +inf beyond 1 and never finite afterwards
    a, b = D.uniform(0, 1), D.uniform(0, 2)
    assert check_lr(a, b).le
    # ratio +inf on (0, 0.5) followed by finite values breaks T1 <= T2
    assert not check_lr(D.uniform(0.5, 1.5), D.uniform(0, 1)).le


# --- properties -------------------------------------------------------------


def test_implication_chain():
    rng = np.random.default_rng(7)
    positives = 0
    for _ in range(200):
        a, b = random_pair(rng)
        lr = check_lr(a, b)
        if lr.direction == INDETERMINATE:
            continue
        for sense in ("le", "ge"):
            if getattr(lr, sense):
                positives += 1
                for rel in ("hr", "st", "sp"):
                    assert getattr(check_order(rel, a, b), sense), (rel, a, b)
    assert positives >= 100


def test_hazard_and_ratio_routes_agree():
    rng = np.random.default_rng(11)
    for _ in range(300):
        a, b = random_pair(rng)
        assert check_hr(a, b, route="ratio").direction == check_hr(a, b, route="hazard").direction, (a, b)


def test_sp_symmetry_continuous():
    rng = np.random.default_rng(3)
    for _ in range(30):
        a, b = random_pair(rng)
        p, q = sp_probability(a, b), sp_probability(b, a)
        assert abs(p.value + q.value - 1) <= p.err + q.err + 1e-12


def test_sp_symmetry_discrete_exact(blyth):
    t1, t2, t3 = blyth
    a = D.discrete([(1, 0.5), (2, 0.25), (3, 0.25)])
    b = D.discrete([(2, 0.5), (3, 0.5)])
    for x, y in [(a, b), (t1, t2), (t2, t3)]:
        p21, p12 = sp_exact(x, y)
        tie = sum((px * py for vx, px in x.atoms for vy, py in y.atoms if vx == vy), Fraction(0))
        assert p21 + p12 == 1 + tie


def _quad_oracle(a, b):
    from scipy import integrate

    lo, hi = min(a.quantile(1e-12), b.quantile(1e-12)), max(a.quantile(1 - 1e-12), b.quantile(1 - 1e-12))
    brk = sorted(set(np.concatenate([a.quantile([0.01, 0.5, 0.99]), b.quantile([0.01, 0.5, 0.99])])))
    v, _ = integrate.quad(lambda t: float(a.pdf(t) * b.sf(t)), lo, hi, points=brk, limit=400, epsabs=1e-13)
    return v


def test_quadrature_sp_against_scipy():
    rng = np.random.default_rng(19)
    for _ in range(25):
        a, b = random_pair(rng)
        est = sp_probability(a, b, "quadrature")
        assert est.value == pytest.approx(_quad_oracle(a, b), abs=max(3 * est.err, 1e-8))


def test_exact_vs_quadrature_exponential():
    rng = np.random.default_rng(23)
    for _ in range(50):
        a, b = D.exponential(rng.uniform(0.2, 5)), D.exponential(rng.uniform(0.2, 5))
        ex = sp_probability(a, b, "exact")
        qu = sp_probability(a, b, "quadrature")
        assert abs(ex.value - qu.value) <= max(qu.err, 1e-12)


def test_mc_within_wilson():
    rng = np.random.default_rng(29)
    cfg = Config(samples=200_000)
    hits = 0
    for i in range(50):
        a, b = random_pair(rng)
        ref = sp_probability(a, b)
        mc = sp_probability(a, b, "monte-carlo", cfg, Rng(100 + i))
        hits += mc.covers(ref.value)
    assert hits >= 47


def test_mixed_pair_atom_sum(blyth):
    e = D.exponential(1.0)
    t2 = blyth[1]
    p = sp_probability(e, t2)
    assert p.value == pytest.approx(0.4 * (1 - math.exp(-1)) + 0.6 * (1 - math.exp(-4)), abs=1e-14)
    assert sp_probability(t2, e).value == pytest.approx(0.4 * math.exp(-1) + 0.6 * math.exp(-4), abs=1e-14)


def test_verdict_to_dict(blyth):
    d = check_sp(blyth[0], blyth[1]).to_dict()
    assert d["relation"] == "sp" and d["details"]["p21"]["fraction"] == "3/5"

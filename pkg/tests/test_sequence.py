import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from conftest import brute_force_chain, exp_chain_oracle
from seqprec import distributions as D
from seqprec.config import Config
from seqprec.errors import MethodUnsupported, MalformedParameter, TooManyVariables
from seqprec.pairwise_orders import sp_probability
from seqprec.permutations import parse_permutation, swap_positions
from seqprec.rng import Rng
from seqprec.sequence_orders import (
    INDETERMINATE, NO, YES, check_ssp, perm_probability, perm_table, transposition_compare,
)

F = Fraction


def test_parse_permutation():
    assert parse_permutation("3,1,2") == (3, 1, 2)
    assert parse_permutation([1, 2], 2) == (1, 2)
    for bad in ["1,1,2", "0,1,2", "1,2", "a,b,c"]:
        with pytest.raises(MalformedParameter):
            parse_permutation(bad, 3)
    assert swap_positions((1, 3, 2), 2, 3) == (1, 2, 3)


def test_exponential_identity(exp321):
    p = perm_probability(exp321, (1, 2, 3))
    assert p.value == pytest.approx(1 / 3, rel=1e-6)


def test_blyth_312(blyth):
    for conv in ("strict", "weak"):
        p = perm_probability(blyth, "3,1,2", cfg=Config(convention=conv))
        assert p.exact == F(9, 25) and p.err == 0


def test_exponential_table(exp321):
    t = perm_table(exp321, "quadrature")
    want = {(1, 2, 3): 1 / 3, (2, 1, 3): 1 / 4, (1, 3, 2): 1 / 6, (2, 3, 1): 1 / 12, (3, 1, 2): 1 / 10, (3, 2, 1): 1 / 15}
    for p, v in want.items():
        assert t[p].value == pytest.approx(v, rel=1e-6)
    assert abs(t.total - 1) <= 1e-6


def test_blyth_strict_table(blyth):
    t = perm_table(blyth)
    want = {(1, 2, 3): F(6, 25), (2, 1, 3): F(4, 25), (2, 3, 1): F(6, 25), (3, 1, 2): F(9, 25), (1, 3, 2): 0, (3, 2, 1): 0}
    assert {p: e.exact for p, e in t} == want
    assert sum(e.exact for _, e in t) == 1
    assert t.convention == "strict"


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_exponential_oracle_all_perms(n):
    rng = np.random.default_rng(n)
    rates = list(rng.uniform(0.3, 4.0, n))
    t = perm_table([D.exponential(r) for r in rates], "quadrature")
    for p, e in t:
        want = exp_chain_oracle(rates, p)
        assert abs(e.value - want) <= 1e-6 * want
    assert abs(t.total - 1) <= 3 * t.total_err + 1e-12


@pytest.mark.parametrize("n", [2, 3, 4])
def test_iid_uniform_over_perms(n):
    d = D.gamma(2.0, 1.5)
    t = perm_table([d] * n, "quadrature")
    assert np.allclose(t.values, 1 / math.factorial(n), rtol=1e-6)


def _random_discrete(rng, max_atoms=4, decimal=True):
    k = int(rng.integers(1, max_atoms + 1))
    xs = sorted(rng.choice(np.arange(1, 8), size=k, replace=False))
    if decimal:
        w = rng.multinomial(20 - k, [1 / k] * k) + 1
        ps = [float(F(int(v), 20)) for v in w]
    else:
        w = rng.uniform(0.1, 1, k)
        ps = list(w / w.sum())
        ps[-1] = 1 - sum(ps[:-1])
    return D.discrete(list(zip(map(float, xs), ps)))


@pytest.mark.parametrize("strict", [True, False])
def test_brute_force_oracle(strict):
    rng = np.random.default_rng(41 if strict else 43)
    cfg = Config(convention="strict" if strict else "weak")
    for _ in range(40):
        n = int(rng.integers(2, 5))
        dists = [_random_discrete(rng) for _ in range(n)]
        t = perm_table(dists, "exact", cfg)
        for p, e in t:
            assert e.exact == brute_force_chain(dists, p, strict)


def test_brute_force_non_decimal():
    rng = np.random.default_rng(47)
    for _ in range(20):
        dists = [_random_discrete(rng, decimal=False) for _ in range(3)]
        for p, e in perm_table(dists, "exact"):
            assert abs(float(e.exact) - float(brute_force_chain(dists, p, True))) <= 1e-12


def test_weak_table_overlaps_with_shared_atoms():
    d = D.discrete([(1.0, 0.5), (2.0, 0.5)])
    t = perm_table([d, d, d], cfg=Config(convention="weak"))
    assert t.total > 1 and t.convention == "weak"
    assert perm_table([d, d, d]).total < 1


def _middle_oracle(dists, perm):
    """P(T_a <= T_b <= T_c) = integral of f_b F_a sf_c, by adaptive quadrature."""
    a, b, c = (dists[q - 1] for q in perm)
    lo, hi = b.quantile(1e-13), b.quantile(1 - 1e-13)
    brk = {float(x) for x in b.quantile([0.01, 0.25, 0.5, 0.75, 0.99])}
    brk |= {e for d in dists for e in d.support if lo < e < hi}
    v, _ = integrate.quad(
        lambda y: float(b.pdf(y) * a.cdf(y) * c.sf(y)), lo, hi, points=sorted(brk), limit=500, epsabs=1e-13
    )
    return v


def _random_continuous(rng):
    c = rng.integers(5)
    if c == 0:
        return D.weibull(rng.uniform(0.5, 3), rng.uniform(0.5, 2))
    if c == 1:
        return D.gamma(rng.uniform(0.5, 4), rng.uniform(0.5, 2))
    if c == 2:
        return D.normal(rng.uniform(0, 2), rng.uniform(0.3, 1.5))
    if c == 3:
        a = rng.uniform(0, 1.5)
        return D.uniform(a, a + rng.uniform(0.3, 2))
    return D.exponential(rng.uniform(0.3, 3))


def test_quadrature_against_scipy_three():
    rng = np.random.default_rng(53)
    for _ in range(30):
        dists = [_random_continuous(rng) for _ in range(3)]
        t = perm_table(dists, "quadrature")
        for p, e in t:
            assert abs(e.value - _middle_oracle(dists, p)) <= max(3 * e.err, 1e-10)


def test_reduction_n2():
    rng = np.random.default_rng(59)
    for _ in range(20):
        a, b = D.weibull(rng.uniform(0.5, 3), rng.uniform(0.5, 2)), D.gamma(rng.uniform(0.5, 3), rng.uniform(0.5, 2))
        assert abs(perm_probability([a, b], (1, 2)).value - sp_probability(a, b, "quadrature").value) <= 1e-9
    x, y = _random_discrete(rng), _random_discrete(rng)
    assert perm_probability([x, y], (1, 2), cfg=Config(convention="weak")).exact == sp_probability(x, y).exact


def test_mc_matches_exact_partition(blyth):
    cfg = Config(samples=200_000)
    t = perm_table(blyth, "monte-carlo", cfg)
    ex = perm_table(blyth)
    assert sum(int(round(e.value * e.samples)) for _, e in t) + t.ties == cfg.samples
    for (p, m), (_, e) in zip(t, ex):
        assert m.covers(float(e.exact)), p
    # a single event from the same seed carries the same count as the table row
    assert perm_probability(blyth, (3, 1, 2), "monte-carlo", cfg).value == t[(3, 1, 2)].value


def test_method_agreement_random():
    rng = np.random.default_rng(61)
    cfg = Config(samples=200_000)
    hits = total = 0
    for i in range(50):
        n = int(rng.integers(2, 5))
        dists = [D.weibull(rng.uniform(0.6, 3), rng.uniform(0.4, 2.5)) for _ in range(n)]
        q = perm_table(dists, "quadrature", cfg)
        m = perm_table(dists, "monte-carlo", cfg, Rng(1000 + i))
        p = tuple(range(1, n + 1))
        hits += m[p].covers(q[p].value)
        total += 1
        assert abs(m.total - 1) <= 1e-12
    assert hits >= 47


def test_parallel_bit_identical(exp321):
    five = [D.weibull(1.5, s) for s in (0.5, 0.8, 1.0, 1.3, 2.0)]
    a = perm_table(five, "quadrature", Config(workers=1))
    b = perm_table(five, "quadrature", Config(workers=4))
    assert [e.value for e in a.estimates] == [e.value for e in b.estimates]
    m1 = perm_table(exp321, "monte-carlo", Config(samples=300_000, workers=1, mc_block=2**15))
    m4 = perm_table(exp321, "monte-carlo", Config(samples=300_000, workers=4, mc_block=2**15))
    assert m1.to_dict() == m4.to_dict()


def test_n_cap():
    with pytest.raises(TooManyVariables):
        perm_table([D.exponential(1.0)] * 9)


def test_method_guard(blyth, exp321):
    with pytest.raises(MethodUnsupported):
        perm_table(blyth, "quadrature")
    with pytest.raises(MethodUnsupported):
        perm_table(exp321, "exact")
    assert perm_table([blyth[0], *exp321[:2]], cfg=Config(samples=10_000)).method == "monte-carlo"


def test_ssp_examples(exp321, blyth):
    r = check_ssp(exp321)
    assert r.ssp_holds == YES and r.argmax == [(1, 2, 3)]
    assert r.margin == pytest.approx(1 / 3 - 1 / 4, abs=1e-9)
    assert r.csp_holds == YES
    b = check_ssp(blyth)
    assert b.ssp_holds == NO and b.argmax == [(3, 1, 2)]
    assert b.margin == pytest.approx(0.24 - 0.36)
    assert b.csp_holds == YES


def test_ssp_target_defaults_and_explicit(blyth):
    r = check_ssp(blyth, target=(3, 1, 2))
    assert r.ssp_holds == YES and r.margin == pytest.approx(0.36 - 0.24)
    # the pairwise sp between T2 and T3 still runs against the 3-1-2 position
    assert r.pairwise["2<3"].le


def test_transposition_examples(exp321):
    r = transposition_compare(exp321, (1, 2, 3), 1, 2, "quadrature")
    assert (r.p_perm.value, r.p_swapped.value) == pytest.approx((1 / 3, 1 / 4), rel=1e-6)
    assert r.holds and not r.reversed
    s = transposition_compare(exp321, (1, 3, 2), 2, 3, "quadrature")
    assert (s.p_perm.value, s.p_swapped.value) == pytest.approx((1 / 6, 1 / 3), rel=1e-6)
    assert s.holds and s.reversed
    with pytest.raises(ValueError):
        transposition_compare(exp321, (1, 2, 3), 2, 2)


def test_transpositions_on_lr_chains():
    rng = np.random.default_rng(67)
    checked = 0
    for _ in range(100):
        n = int(rng.integers(3, 5))
        if rng.random() < 0.5:
            dists = [D.exponential(r) for r in sorted(rng.uniform(0.2, 5, n), reverse=True)]
        else:
            k = rng.uniform(0.5, 3)
            dists = [D.weibull(k, s) for s in sorted(rng.uniform(0.3, 3, n))]
        t = perm_table(dists, "quadrature")
        for p in t.perms:
            for j, k in itertools.combinations(range(1, n + 1), 2):
                assert transposition_compare(dists, p, j, k, table=t).holds
                checked += 1
    assert checked >= 1000


def test_table_report_roundtrip(exp321):
    d = perm_table(exp321, "quadrature").to_dict()
    assert len(d["entries"]) == 6 and d["entries"][0]["perm"] == [1, 2, 3]
    assert abs(d["total"] - 1) < 1e-6


def test_n5_table_time():
    t0 = time.perf_counter()
    t = perm_table([D.exponential(r) for r in (5.0, 4.0, 3.0, 2.0, 1.0)], "quadrature")
    assert time.perf_counter() - t0 < 60 and len(t) == 120

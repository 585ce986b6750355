from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from seqprec import distributions as D
from seqprec.applications import (
    ALL_ALLOCATIONS, AllocationSpec, best_allocation_check, series_parallel_compare, sp_ratio,
)
from seqprec.config import Config
from seqprec.errors import MalformedParameter
from seqprec.rng import Rng
from seqprec.sequence_orders import perm_table

fracs = st.fractions(min_value=0, max_value=1)


def test_sp_ratio_examples(blyth):
    assert sp_ratio(Fraction(1, 3), Fraction(1, 15)) == Fraction(5, 6)
    assert sp_ratio(0.36, 0.24) == pytest.approx(0.6, abs=1e-15)
    t = perm_table(blyth)
    assert sp_ratio(t[(3, 1, 2)].exact, t[(1, 2, 3)].exact) == Fraction(3, 5)


def test_sp_ratio_errors():
    with pytest.raises(ZeroDivisionError):
        sp_ratio(0, 0)
    with pytest.raises(ValueError):
        sp_ratio(-0.1, 0.5)


@given(fracs, fracs)
def test_sp_ratio_complement(p, q):
    if p + q > 0:
        assert sp_ratio(p, q) + sp_ratio(q, p) == 1


@given(fracs, fracs, fracs)
def test_sp_ratio_monotone(p1, p2, q):
    lo, hi = sorted((p1, p2))
    if lo + q > 0:
        assert sp_ratio(lo, q) <= sp_ratio(hi, q)


def test_allocation_parse():
    a = AllocationSpec.parse("3,1,2")
    assert a.series == 3 and a.parallel == (1, 2) and a.as_list() == [3, 1, 2]
    with pytest.raises(MalformedParameter):
        AllocationSpec.parse("3,3,1")
    assert len(set(ALL_ALLOCATIONS)) == 6


def test_lifetime():
    X = np.array([[1.0, 2.0, 3.0], [5.0, 0.5, 0.2]])
    assert list(AllocationSpec(3, (1, 2)).lifetime(X)) == [2.0, 0.2]
    assert list(AllocationSpec(1, (2, 3)).lifetime(X)) == [1.0, 0.5]


def test_coupling_invariant(exp321, blyth):
    for dists in (exp321, blyth):
        a, b = AllocationSpec(3, (1, 2)), AllocationSpec(1, (2, 3))
        n = 50_000
        ab = series_parallel_compare(dists, a, b, Rng(9), n)
        ba = series_parallel_compare(dists, b, a, Rng(9), n)
        assert ab.weak_count + ba.strict_count == n
        assert ab.strict_count == ba.reverse_strict_count


def test_identical_allocations(blyth):
    a = AllocationSpec(3, (1, 2))
    r = series_parallel_compare(blyth, a, AllocationSpec(3, (2, 1)), Rng(1), 10_000)
    assert r.weak.value == 1.0 and r.strict_count == 0


def test_discrete_ties_reported(blyth):
    r = series_parallel_compare(blyth, AllocationSpec(1, (2, 3)), AllocationSpec(2, (1, 3)), Rng(2), 20_000)
    assert r.weak_count > r.strict_count


def test_best_allocation_exponential(exp321):
    rows = best_allocation_check(exp321, Rng(0), 10**6, Config())
    assert len(rows) == 5
    assert all(r["status"] == "cleared" for r in rows)
    assert all(r["weak"]["value"] >= 0.5 for r in rows)


def test_parallel_workers_identical(exp321):
    a, b = AllocationSpec(3, (1, 2)), AllocationSpec(2, (1, 3))
    x = series_parallel_compare(exp321, a, b, Rng(4), 300_000, Config(workers=1, mc_block=2**15))
    y = series_parallel_compare(exp321, a, b, Rng(4), 300_000, Config(workers=4, mc_block=2**15))
    assert x.to_dict() == y.to_dict()


def test_needs_three(exp321):
    with pytest.raises(ValueError):
        series_parallel_compare(exp321[:2], ALL_ALLOCATIONS[0], ALL_ALLOCATIONS[1], Rng(0), 10)

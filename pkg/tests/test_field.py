from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cycsrg.errors import BudgetExceeded, CacheError, NotPrime, PolynomialReducible, ZeroArgument
from cycsrg.field import (
    ZERO,
    build_field,
    eta,
    is_irreducible,
    least_irreducible,
    prime_power,
    read_trace_cache,
    relative_trace,
    subfield_map,
    trace_to,
    write_trace_cache,
)

from oracles import brute_irreducible, naive_powers, naive_trace

SMALL = [(2, 1), (2, 4), (3, 1), (3, 3), (5, 2), (7, 1), (7, 2), (7, 3), (11, 2), (13, 1)]


@pytest.mark.parametrize("p,f", SMALL)
def test_tables_match_schoolbook_arithmetic(p, f):
    t = build_field(p, f)
    powers = naive_powers(tuple(t.digits(t.gamma).tolist()), t.spec.poly, p)
    assert [tuple(d) for d in t.digits(t.antilog).tolist()] == powers
    assert sorted(t.antilog.tolist()) == list(range(1, p**f))
    traces = [naive_trace(x, t.spec.poly, p) for x in powers]
    assert t.trace.tolist() == traces


@pytest.mark.parametrize("p,f", [(2, 3), (3, 2), (3, 4), (5, 3), (7, 2), (7, 3)])
def test_least_irreducible_is_least(p, f):
    poly = least_irreducible(p, f)
    assert brute_irreducible(poly, p)
    # every smaller monic candidate, comparing the constant term first, is reducible
    import itertools

    for tail in itertools.product(range(p), repeat=f):
        if tail >= poly[:-1]:
            break
        assert not brute_irreducible(tail + (1,), p)
    assert is_irreducible(poly, p)


@given(st.sampled_from([2, 3, 5, 7]), st.integers(1, 4), st.data())
@settings(max_examples=60, deadline=None)
def test_rabin_agrees_with_trial_division(p, f, data):
    tail = data.draw(st.lists(st.integers(0, p - 1), min_size=f, max_size=f))
    poly = tuple(tail) + (1,)
    assert is_irreducible(poly, p) == brute_irreducible(poly, p)


def test_known_polynomials():
    assert build_field(7, 3).spec.poly == (1, 0, 1, 1)
    assert build_field(7, 1).gamma == 3
    assert build_field(2, 1).gamma == 1


@given(st.integers(0, 341), st.integers(0, 341), st.integers(0, 341))
@settings(max_examples=200, deadline=None)
def test_field_axioms_f73(a, b, c):
    t = build_field(7, 3)
    assert t.add(a, b) == t.add(b, a)
    assert t.add(t.add(a, b), c) == t.add(a, t.add(b, c))
    assert t.mul(a, t.add(b, c)) == t.add(t.mul(a, b), t.mul(a, c))
    assert t.add(a, t.neg(a)) == ZERO
    assert t.mul(a, t.inv(a)) == 0
    assert t.add(a, ZERO) == a


@given(st.integers(0, 341), st.integers(0, 341))
@settings(max_examples=100, deadline=None)
def test_trace_linear_and_frobenius_invariant(a, b):
    t = build_field(7, 3)
    assert t.trace_exp(t.add(a, b)) == (t.trace_exp(a) + t.trace_exp(b)) % 7
    assert t.trace_exp(t.power(a, 7)) == t.trace_exp(a)


def test_trace_balance():
    t = build_field(5, 4)
    counts = np.bincount(np.concatenate(([0], t.trace)), minlength=5)
    assert counts.tolist() == [125] * 5


def test_errors():
    with pytest.raises(NotPrime):
        build_field(9, 2)
    with pytest.raises(BudgetExceeded):
        build_field(7, 9, budget=10**6)
    with pytest.raises(PolynomialReducible):
        build_field(7, 2, poly=(1, 2, 1))  # (x+1)^2
    with pytest.raises(ZeroArgument):
        eta(build_field(7, 1), ZERO)
    with pytest.raises(NotPrime):
        prime_power(12)
    assert prime_power(343) == (7, 3)


def test_subfield_view():
    big = build_field(7, 6)
    sm = subfield_map(big, 3)
    assert sm.stride == 344
    view = sm.table
    assert sorted(view.antilog.tolist()) == sorted(big.antilog[::344].tolist())
    # view arithmetic agrees with the big field through the embedding
    for a, b in [(1, 2), (5, 300), (100, 17)]:
        assert sm.embed(view.add(a, b)) == big.add(sm.embed(a), sm.embed(b))
    # relative trace lands in F_7 and is linear
    codes = relative_trace(big, 7**3, np.arange(0, 2000, 7))
    assert np.all(np.isin(codes, sm.image()))
    x = trace_to(big, 5, 3)
    assert x == ZERO or big.log[big.antilog[x]] == x


def test_cache_roundtrip(tmp_path):
    t = build_field(7, 3, cache_dir=tmp_path)
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    spec, trace = read_trace_cache(files[0])
    assert spec == t.spec
    assert trace[0] == 0 and trace[1:].tolist() == t.trace.tolist()
    again = build_field(7, 3, cache_dir=tmp_path)
    assert again.trace.tolist() == t.trace.tolist()
    files[0].write_bytes(b"garbage")
    with pytest.raises(CacheError):
        read_trace_cache(files[0])
    # a corrupt cache is ignored and rebuilt
    assert build_field(7, 3, cache_dir=tmp_path).trace.tolist() == t.trace.tolist()


def test_cache_refuses_views(tmp_path):
    view = subfield_map(build_field(3, 4), 2).table
    with pytest.raises(CacheError):
        write_trace_cache(view, tmp_path / "x.bin")

"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline;
they are also repeated in the terminal summary.
"""
from __future__ import annotations

import gc
import math
import time
from collections import Counter
from contextlib import contextmanager

import numpy as np
from sympy import primerange

from cycsrg import srg
from cycsrg.conic import (
    conic_character_values,
    conic_points,
    g_M_closed_form,
    g_M_congruence_value,
    lift_XQ,
    main2_character_values,
    purity_congruence,
    quotient_and_purity,
)
from cycsrg.cycint import CyclotomicInteger, cyclo_complex
from cycsrg.cyclotomy import (
    ap_class_sizes,
    class_histogram,
    detect_three_valued_ap,
    gauss_periods,
    gauss_sum_numeric,
    quadratic_gauss_sum_exact,
)
from cycsrg.field import build_field, eta, prime_power, subfield_map

RESULTS: list[str] = []


@contextmanager
def criterion(num: int, title: str, limit_s: float):
    t0 = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        dt = time.perf_counter() - t0
        within = dt < limit_s
        status = "PASS" if ok and within else "FAIL"
        note = "" if within else f" (over the {limit_s:.0f} s limit)"
        line = f"[{status}] criterion {num}: {title} in {dt:.2f} s{note}"
        RESULTS.append(line)
        print(line)
    assert within, f"criterion {num} took {dt:.1f} s, limit {limit_s} s"


EXAMPLE_I = ({0}, {8, 10, 12, 13, 15, 18}, {1, 2, 3, 4, 5, 6, 7, 9, 11, 14, 16, 17})
EXAMPLE_Y = {8, 12, 37, 56, 65, 69, 10, 15, 34, 51, 67, 70, 0, 19, 38, 57}


def test_criterion_1_example():
    with criterion(1, "q=7, M=3 example: periods, I sets, S1'' and Y", 5):
        small = build_field(7, 3)
        prof = gauss_periods(small, 19, 7)
        assert Counter(prof.values) == Counter({11: 1, 4: 6, -3: 12})
        ap = detect_three_valued_ap(prof)
        ours = (set(ap.I1), set(ap.I2), set(ap.I3))
        units = [u for u in range(1, 19)
                 if all({(u * i) % 19 for i in mine} == theirs for mine, theirs in zip(ours, EXAMPLE_I))]
        assert units
        u = units[0]
        uinv = pow(u, -1, 19)
        S1 = tuple(sorted((uinv * s) % 19 for s in (8, 12, 18)))
        S2 = tuple(sorted(set(ap.I2) - set(S1)))
        Y = srg.build_YX(S1, S2, ap.I1, 19)
        if u == 1:
            assert srg.quarter(S1, 19) == (2, 3, 14)
            assert set(Y) == EXAMPLE_Y
        else:
            assert Counter((u * y) % 19 for y in Y) == Counter(y % 19 for y in EXAMPLE_Y)
        X = srg.derive_X(S1, S2, 19, ap.I2)
        assert srg.check_condition(X, ap.I2, small, 19).holds


def _full_instance(q, M, values, k):
    res = srg.construct(q, M)
    assert res.condition.holds
    assert res.verdict.is_srg
    assert res.verdict.values == values
    assert res.verdict.k == k
    assert list(res.predicted) == list(res.measured)
    return res


def test_criterion_2_q7_M3():
    with criterion(2, "q=7, M=3 over F_{7^6}: spectrum {72, -271}, k=24768, prediction exact", 60):
        res = _full_instance(7, 3, (72, -271), 24768)
        assert len(res.measured) == 76
        big = build_field(7, 6)
        on, off = srg.common_neighbors(big, res.Y, res.N)
        assert on == {res.verdict.lam} and off == {res.verdict.mu}


def test_criterion_3_q11_M7():
    with criterion(3, "q=11, M=7 over F_{11^6}: spectrum {420, -911}, k=559440, prediction exact", 300):
        res = _full_instance(11, 7, (420, -911), 559440)
        assert len(res.measured) == 76
    gc.collect()


def test_criterion_4_sporadic(ctx77):
    with criterion(4, "7^7, N=29: values {272,-71,-414} sizes (7,21,1), condition for (I2, {})", 120):
        prof = ctx77.profile
        ap = ctx77.ap
        assert Counter(prof.values) == Counter({272: 7, -71: 21, -414: 1})
        X = srg.derive_X(ap.I2, (), 29, ap.I2)
        assert len(X) == 21 and all(x % 2 == 0 for x in X)
        rep = srg.check_condition(X, ap.I2, ctx77.small, 29, ctx77.hist_small(58))
        assert rep.holds
        predicted = srg.predict_spectrum(ctx77, rep)
        r = 35 * (7**7 - 1) // 58
        assert set(predicted) == {r, r - 7**7}


def _sweep_cases():
    cases = []
    for q in range(3, 201):
        if q % 2 == 0:
            continue
        try:
            prime_power(q)
        except ValueError:
            continue
        for M in (3, 7):
            if purity_congruence(q, M):
                cases.append((q, M))
    return cases


def test_criterion_5_purity_sweep():
    cases = _sweep_cases()
    with criterion(5, f"purity sweep over {len(cases)} (q, M) cases with q <= 200 and g_M closed forms", 300):
        assert (7, 3) in cases and (11, 7) in cases and (199, 3) in cases
        for q, M in cases:
            p, e = prime_power(q)
            t = build_field(p, 3 * e)
            c = lift_XQ(t)
            quo = quotient_and_purity(t, c, M)
            assert quo.pure, (q, M)
            e2 = eta(t, t.constant(2))
            assert quo.g_values
            for u, l in quo.ell.items():
                assert quo.g_values[u] == g_M_closed_form(t, M, l)
                assert quo.g_values[u] != e2
            prop = g_M_congruence_value(q, M)
            if prop is not None:
                assert set(quo.g_values.values()) == {prop}
            del t, c, quo
            gc.collect()


def test_criterion_6_conic_suite():
    with criterion(6, "conic suite for q in {3, 7, 11, 19, 23}", 60):
        for q in (3, 7, 11, 19, 23):
            t = build_field(q, 3)
            n = q * q + q + 1
            W = conic_points(t)
            assert len(W) == q + 1
            c = lift_XQ(t)
            measured, expected = conic_character_values(t, c)
            assert measured == expected
            got, want = main2_character_values(t, c)
            assert np.max(np.abs(got - want)) < 1e-6
            G = cyclo_complex(quadratic_gauss_sum_exact(t))
            eps = 1 if q % 4 == 1 else -1
            four = {(-1 + eps * q) / 2, (-1 - eps * q) / 2, (-1 + G) / 2, (-1 - G) / 2}
            assert all(min(abs(v - w) for w in four) < 1e-6 for v in got)
            ref = lift_XQ(t, normalize=False).X_Q
            shifted = tuple(sorted((x + n) % (2 * n) for x in ref))
            for d0 in W:
                assert lift_XQ(t, d0, normalize=False, W_Q=W).X_Q in (ref, shifted)


def _random_fields(count, seed=20261015):
    pool = [(p, f) for p in primerange(3, 10**6) for f in range(1, 20) if p**f < 10**6]
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(pool), size=count, replace=False)
    return [pool[i] for i in sorted(idx)]


def test_criterion_7_gauss_sums():
    fields = _random_fields(20)
    with criterion(7, "Gauss sums: G^2 = eta(-1) q on 20 random fields, Davenport-Hasse, semi-primitive", 60):
        for p, f in fields:
            t = build_field(p, f)
            q = p**f
            G = quadratic_gauss_sum_exact(t)
            eta_m1 = 1 if q % 4 == 1 else -1
            assert G * G == CyclotomicInteger.from_int(p, eta_m1 * q), (p, f)
            del t, G
        for p, s, d in ((7, 2, 3), (13, 3, 4), (5, 4, 4), (11, 2, 10), (3, 6, 2)):
            big = build_field(p, s)
            small = subfield_map(big, 1).table
            for j in range(1, d):
                lifted = gauss_sum_numeric(big, d, j)
                expected = (-1) ** (s - 1) * gauss_sum_numeric(small, d, j) ** s
                assert abs(lifted - expected) <= 1e-6 * abs(expected)
        for p, j, gam, N in ((3, 1, 1, 4), (7, 1, 2, 8), (5, 1, 1, 6), (2, 2, 1, 5), (11, 1, 1, 12)):
            t = build_field(p, 2 * j * gam)
            q = p ** (2 * j * gam)
            sign = (-1) ** (gam - 1) if p == 2 else (-1) ** (gam - 1 + (p**j + 1) * gam // N)
            G = gauss_sum_numeric(t, N, 1)
            assert abs(G - sign * math.sqrt(q)) <= 1e-6 * math.sqrt(q)


def test_criterion_8_degenerate():
    with criterion(8, "M=1 over F_{7^6}: X = X_Q gives spectrum {24, -319}", 60):
        res = _full_instance(7, 1, (24, -319), 8 * 1032)
        assert res.I[0] == ()
        big = build_field(7, 6)
        on, off = srg.common_neighbors(big, res.Y, res.N)
        assert on == {res.verdict.lam} and off == {res.verdict.mu}


def test_criterion_9_invariants(ctx73, ctx77):
    with criterion(9, "invariants: period sums, class symmetry, size formulas, SRG identities", 120):
        for p, f, N in ((7, 3, 19), (7, 3, 57), (3, 6, 13), (11, 3, 133), (5, 3, 31)):
            h = class_histogram(build_field(p, f), N)
            assert CyclotomicInteger(p, h.sum(axis=0)) == -1
        for ctx in (ctx73,):
            v1 = ctx.big.q - 1
            assert (v1 // 2) % (4 * ctx.N) == 0
            e = np.arange(v1)
            neg = ctx.big.encode((-ctx.big.digits(ctx.big.antilog)) % ctx.big.p)
            assert np.all(ctx.big.log[neg] % (4 * ctx.N) == e % (4 * ctx.N))
        for ctx in (ctx73, ctx77):
            ap = ctx.ap
            sizes = ap_class_sizes(ctx.N, ap.k, ap.alpha[1], ap.t)
            assert tuple(int(s) for s in sizes) == (len(ap.I1), len(ap.I2), len(ap.I3))
            assert all(s.denominator == 1 for s in sizes)
        for q, M in ((7, 3), (7, 1)):
            res = srg.construct(q, M)
            v = res.verdict
            assert v.k * (v.k - v.lam - 1) == (v.v - v.k - 1) * v.mu
            assert v.theta * v.tau == v.mu - v.k and v.theta + v.tau == v.lam - v.mu
            assert sum(res.measured) == -len(res.Y)
            counts = Counter(res.measured)
            per = (v.v - 1) // (4 * res.N)
            f_mult, g_mult = counts[v.theta] * per, counts[v.tau] * per
            assert v.k + f_mult * v.theta + g_mult * v.tau == 0

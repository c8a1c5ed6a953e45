"""Cayley graphs on F_{q^{2m}} built from a partition of the middle period class.

Indices live in Z_N (period classes of F_{q^m}), Z_2N (the set X) and Z_4N
(the set Y, whose classes gamma^i <gamma^{4N}> form the connection set).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .conic import lift_XQ, quotient_and_purity
from .cycint import rational_rows
from .cyclotomy import (
    APProfile,
    PeriodProfile,
    class_histogram,
    detect_three_valued_ap,
    gauss_periods,
    singer_set,
)
from .errors import (
    BudgetExceeded,
    ConditionNotVerified,
    DuplicateIndex,
    EvenModulus,
    InternalError,
    NotADivisor,
    NotAPartition,
    NotRational,
    NotThreeValued,
    PreconditionError,
)
from .field import DEFAULT_BUDGET, FieldTable, build_field, prime_power, subfield_map

ADJACENCY_LIMIT = 10**4
SEARCH_BUDGET = 2**24


# -- index sets ---------------------------------------------------------------

def _check_odd(N: int) -> None:
    if N < 1 or N % 2 == 0:
        raise EvenModulus(f"N = {N} must be odd")


def check_partition(S1, S2, I2) -> None:
    s1, s2 = set(S1), set(S2)
    if s1 & s2 or s1 | s2 != set(I2) or len(s1) != len(S1) or len(s2) != len(S2):
        raise NotAPartition(f"{sorted(s1)} | {sorted(s2)} is not a partition of {sorted(I2)}")


def quarter(S, N: int) -> tuple[int, ...]:
    """S'' = 4^{-1} S mod N."""
    _check_odd(N)
    inv4 = pow(4, -1, N)
    return tuple(sorted((inv4 * s) % N for s in S))


def derive_X(S1, S2, N: int, I2=None) -> tuple[int, ...]:
    """X = 2 S1'' u (2 S2'' + N) mod 2N."""
    _check_odd(N)
    if I2 is not None:
        check_partition(S1, S2, I2)
    X = [(2 * s) % (2 * N) for s in quarter(S1, N)]
    X += [(2 * s + N) % (2 * N) for s in quarter(S2, N)]
    if len(set(X)) != len(X):
        raise DuplicateIndex("X has repeated elements")
    return tuple(sorted(X))


def partition_from_X(X, N: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Inverse of derive_X."""
    _check_odd(N)
    S1, S2 = [], []
    for x in X:
        x %= 2 * N
        if x % 2 == 0:
            S1.append((4 * (x // 2)) % N)
        else:
            S2.append((4 * ((x - N) // 2)) % N)
    return tuple(sorted(S1)), tuple(sorted(S2))


def build_YX(S1, S2, I1, N: int) -> tuple[int, ...]:
    _check_odd(N)
    M4 = 4 * N
    Y = [(N * i + 4 * j) % M4 for i in (0, 3) for j in quarter(S1, N)]
    Y += [(N * i + 4 * j) % M4 for i in (1, 2) for j in quarter(S2, N)]
    Y += [(N * i + 4 * j) % M4 for i in range(4) for j in quarter(I1, N)]
    if len(set(Y)) != len(Y):
        raise DuplicateIndex("Y_X has repeated elements")
    return tuple(sorted(Y))


# -- condition on X -----------------------------------------------------------

@dataclass(frozen=True)
class ConditionReport:
    """signs[c] is +1/-1 when B(c) = +-G, 0 when B(c) = 0, None when neither."""

    N: int
    holds: bool
    signs: tuple
    failures: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"holds": self.holds, "signs": list(self.signs), "failures": list(self.failures)}


def _gauss_from_hist2(hist2N: np.ndarray) -> np.ndarray:
    # 2N is even, so the class index has the parity of the exponent
    return hist2N[0::2].sum(axis=0) - hist2N[1::2].sum(axis=0)


def condition_values(X, I2, N: int, hist2N: np.ndarray) -> np.ndarray:
    """Coefficient vectors of B(c) for every c in Z_2N, shape (2N, p)."""
    _check_odd(N)
    H = np.asarray(hist2N, dtype=np.int64)
    PN = H[:N] + H[N:]
    half2 = np.array(sorted((pow(2, -1, N) * i) % N for i in I2), dtype=np.int64)
    X = np.asarray(X, dtype=np.int64)
    c = np.arange(2 * N)
    B = 2 * H[(c[:, None] + X[None, :]) % (2 * N)].sum(axis=1) if len(X) else np.zeros_like(H)
    if len(half2):
        B = B - PN[(c[:, None] + half2[None, :]) % N].sum(axis=1)
    return B


def _is_const(v: np.ndarray) -> bool:
    return bool(np.all(v == v[0]))


def check_condition(X, I2, small: FieldTable, N: int, hist2N: np.ndarray | None = None) -> ConditionReport:
    """Exact test of B(c) = +-G(eta) on 2^{-1} I2 (mod N) and B(c) = 0 elsewhere."""
    if hist2N is None:
        hist2N = class_histogram(small, 2 * N)
    B = condition_values(X, I2, N, hist2N)
    G = _gauss_from_hist2(hist2N)
    half2 = {(pow(2, -1, N) * i) % N for i in I2}
    signs, failures = [], []
    for c, row in enumerate(B):
        if _is_const(row):
            s = 0
        elif _is_const(row - G):
            s = 1
        elif _is_const(row + G):
            s = -1
        else:
            s = None
        signs.append(s)
        if (c % N in half2) != (s in (1, -1)) or s is None:
            failures.append(c)
    return ConditionReport(N=N, holds=not failures, signs=tuple(signs), failures=tuple(failures))


# -- context and spectra -----------------------------------------------------

@dataclass(eq=False)
class ConstructionContext:
    q: int
    m: int
    N: int
    I1: tuple[int, ...]
    I2: tuple[int, ...]
    I3: tuple[int, ...]
    big: FieldTable | None
    small: FieldTable
    profile: PeriodProfile
    ap: APProfile | None = None
    _hists: dict = field(default_factory=dict, repr=False)

    @property
    def q_m(self) -> int:
        return self.q**self.m

    @property
    def rho(self) -> int:
        return 1 if self.q_m % 8 == 7 else -1

    def hist_small(self, n: int) -> np.ndarray:
        if ("s", n) not in self._hists:
            self._hists[("s", n)] = class_histogram(self.small, n)
        return self._hists[("s", n)]

    def hist_big(self, n: int, workers: int = 1) -> np.ndarray:
        if self.big is None:
            raise PreconditionError("context has no big field")
        if ("b", n) not in self._hists:
            self._hists[("b", n)] = class_histogram(self.big, n, workers)
        return self._hists[("b", n)]


def level_sets(profile: PeriodProfile) -> tuple[tuple, tuple, tuple, APProfile | None]:
    """(I1, I2, I3, ap); a two-valued profile gives I1 empty and I2 the larger value."""
    ap = detect_three_valued_ap(profile)
    if ap is not None:
        return ap.I1, ap.I2, ap.I3, ap
    vals = sorted({v for v in profile.values if v is not None}, reverse=True)
    if len(vals) == 2 and None not in profile.values:
        I2 = tuple(i for i, v in enumerate(profile.values) if v == vals[0])
        I3 = tuple(i for i, v in enumerate(profile.values) if v == vals[1])
        return (), I2, I3, None
    raise NotThreeValued(f"order-{profile.N} periods take values {sorted(set(profile.values), key=str)}")


def make_context(q: int, m: int, N: int, *, big: FieldTable | None = None,
                 budget: int = DEFAULT_BUDGET, cache_dir=None) -> ConstructionContext:
    p, e = prime_power(q)
    _check_odd(N)
    qm = q**m
    if qm % 4 != 3:
        raise PreconditionError(f"q^m = {qm} is not 3 mod 4")
    if ((qm - 1) // (q - 1)) % N:
        raise NotADivisor(f"{N} does not divide (q^m-1)/(q-1)")
    if big is None:
        big = build_field(p, 2 * m * e, budget=budget, cache_dir=cache_dir)
    elif big.q != qm * qm:
        raise PreconditionError("big field must be F_{q^{2m}}")
    # omega = gamma^{q^m + 1}, so the small field's I sets match the big field's classes
    small = subfield_map(big, m * e).table
    profile = gauss_periods(small, N, q)
    I1, I2, I3, ap = level_sets(profile)
    return ConstructionContext(q=q, m=m, N=N, I1=I1, I2=I2, I3=I3, big=big, small=small,
                               profile=profile, ap=ap)


def make_small_context(q: int, m: int, N: int, *, budget: int = DEFAULT_BUDGET,
                       cache_dir=None) -> ConstructionContext:
    """Context over a standalone F_{q^m}, for condition checks and predictions only."""
    p, e = prime_power(q)
    _check_odd(N)
    if (q**m) % 4 != 3:
        raise PreconditionError(f"q^m = {q**m} is not 3 mod 4")
    small = build_field(p, m * e, budget=budget, cache_dir=cache_dir)
    profile = gauss_periods(small, N, q)
    I1, I2, I3, ap = level_sets(profile)
    return ConstructionContext(q=q, m=m, N=N, I1=I1, I2=I2, I3=I3, big=None, small=small,
                               profile=profile, ap=ap)


def delta(a: int, N: int) -> int:
    r = a % 4
    if N % 4 == 1:
        return 1 if r in (0, 1) else -1
    return 1 if r in (0, 3) else -1


def predict_spectrum(ctx: ConstructionContext, report: ConditionReport) -> list[int]:
    """psi(gamma^a D_X) for a in Z_4N from the per-c signs of the condition report."""
    if not report.holds:
        raise ConditionNotVerified(f"condition fails at c in {list(report.failures)}")
    N, qm = ctx.N, ctx.q_m
    inv4 = pow(4, -1, N)
    I1, I2 = set(ctx.I1), set(ctx.I2)
    const = Fraction((qm - 1) * (2 * len(I1) + len(I2)), 2 * N)
    out = []
    for a in range(4 * N):
        c = 2 * ((inv4 * a) % N)
        val = Fraction(ctx.rho * delta(a, N) * report.signs[c] * qm, 2) + const
        if a % N in I1:
            val -= qm
        elif a % N in I2:
            val -= Fraction(qm, 2)
        if val.denominator != 1:
            raise InternalError(f"non-integral prediction {val} at a={a}")
        out.append(int(val))
    return out


def measure_spectrum(big: FieldTable, Y, N: int, hist4N: np.ndarray | None = None,
                     workers: int = 1) -> list[int]:
    """psi(gamma^a D_X) for a in Z_4N, summed from the order-4N class histogram."""
    if hist4N is None:
        hist4N = class_histogram(big, 4 * N, workers)
    Y = np.asarray(Y, dtype=np.int64)
    a = np.arange(4 * N)
    rows = hist4N[(a[:, None] + Y[None, :]) % (4 * N)].sum(axis=1)
    try:
        return [int(v) for v in rational_rows(rows)]
    except NotRational as exc:
        raise NotRational(exc.coeffs, "connection set is not inverse-closed") from None


@dataclass(frozen=True)
class SRGVerdict:
    is_srg: bool
    v: int
    k: int
    values: tuple[int, ...]
    lam: int | None = None
    mu: int | None = None
    theta: int | None = None
    tau: int | None = None

    def to_dict(self) -> dict:
        return {"is_srg": self.is_srg, "v": self.v, "k": self.k, "restricted_values": list(self.values),
                "lambda": self.lam, "mu": self.mu, "theta": self.theta, "tau": self.tau}


def classify_srg(measured, v: int, k: int) -> SRGVerdict:
    values = tuple(sorted(set(int(x) for x in measured), reverse=True))
    if len(values) != 2:
        return SRGVerdict(False, v, k, values)
    theta, tau = values
    mu = k + theta * tau
    lam = mu + theta + tau
    if k * (k - lam - 1) != (v - k - 1) * mu:
        return SRGVerdict(False, v, k, values)
    return SRGVerdict(True, v, k, values, lam, mu, theta, tau)


def connection_codes(big: FieldTable, Y, N: int) -> np.ndarray:
    e = np.arange(big.q - 1, dtype=np.int64)
    return big.antilog[np.isin(e % (4 * N), np.asarray(Y, dtype=np.int64))]


def common_neighbors(big: FieldTable, Y, N: int) -> tuple[set[int], set[int]]:
    """Brute-force |D n (D + x)| for one x per class: (values on D, values off D).

    Multiplication by gamma^{4N} is a graph automorphism fixing 0, so one
    representative per order-4N class covers every nonzero x.
    """
    D = connection_codes(big, Y, N)
    member = np.zeros(big.q, dtype=bool)
    member[D] = True
    neg = big.encode((-big.digits(D)) % big.p)
    if not np.all(member[neg]):
        raise InternalError("connection set is not symmetric")
    Dd = big.digits(D)
    Yset = set(int(y) for y in Y)
    on, off = set(), set()
    for i in range(4 * N):
        xd = big.digits(big.antilog[i])
        cnt = int(member[big.encode((Dd - xd) % big.p)].sum())
        (on if i in Yset else off).add(cnt)
    return on, off


# -- partition search --------------------------------------------------------

@dataclass(frozen=True)
class SearchHit:
    S1: tuple[int, ...]
    S2: tuple[int, ...]
    X: tuple[int, ...]
    signs: tuple

    def to_dict(self) -> dict:
        return {"S1": list(self.S1), "S2": list(self.S2), "X": list(self.X), "signs": list(self.signs)}


def search_partitions(I2, small: FieldTable, N: int, *, budget: int = SEARCH_BUDGET,
                      hist2N: np.ndarray | None = None, chunk: int = 1 << 14) -> list[SearchHit]:
    """All partitions {S1, S2} of I2 (min(I2) in S1) satisfying the condition.

    Candidates are screened in floating point over bitmasks; survivors are
    rechecked exactly.
    """
    _check_odd(N)
    I2 = sorted(I2)
    n = len(I2)
    if budget < 1 or 2**n > budget:
        raise BudgetExceeded(f"2^{n} partitions exceed budget {budget}")
    if hist2N is None:
        hist2N = class_histogram(small, 2 * N)
    if n == 0:
        rep = check_condition((), (), small, N, hist2N)
        return [SearchHit((), (), (), rep.signs)] if rep.holds else []
    zeta = np.exp(2j * np.pi * np.arange(small.p) / small.p)
    per = hist2N @ zeta
    G = complex(_gauss_from_hist2(hist2N) @ zeta)
    tol = 1e-6 * max(1.0, abs(G))
    c = np.arange(2 * N)
    inv4 = pow(4, -1, N)
    q2 = np.array([(inv4 * s) % N for s in I2])
    even = per[(c[:, None] + 2 * q2[None, :]) % (2 * N)]
    odd = per[(c[:, None] + 2 * q2[None, :] + N) % (2 * N)]
    PN = per[:N] + per[N:]
    half2 = np.array([(pow(2, -1, N) * s) % N for s in I2])
    base = 2 * odd.sum(axis=1) - PN[(c[:, None] + half2[None, :]) % N].sum(axis=1)
    diff = 2 * (even - odd)  # (2N, n)
    on = np.isin(c % N, half2)
    hits = []
    total = 2 ** (n - 1)
    bits = np.arange(n - 1)
    for lo in range(0, total, chunk):
        ids = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        # element 0 always in S1; bit b of id decides element b+1
        masks = np.ones((len(ids), n))
        masks[:, 1:] = (ids[:, None] >> bits[None, :]) & 1
        B = base[None, :] + masks @ diff.T
        ok_on = np.minimum(np.abs(B - G), np.abs(B + G))[:, on] < tol
        ok_off = np.abs(B[:, ~on]) < tol
        good = np.all(ok_on, axis=1) & np.all(ok_off, axis=1)
        for row in np.flatnonzero(good):
            m = masks[row].astype(bool)
            S1 = tuple(s for s, b in zip(I2, m) if b)
            S2 = tuple(s for s, b in zip(I2, m) if not b)
            X = derive_X(S1, S2, N)
            rep = check_condition(X, I2, small, N, hist2N)
            if rep.holds:
                hits.append(SearchHit(S1, S2, X, rep.signs))
    return hits


# -- pipeline ----------------------------------------------------------------

@dataclass(frozen=True)
class ConstructionResult:
    q: int
    m: int
    N: int
    M: int | None
    S1: tuple[int, ...]
    S2: tuple[int, ...]
    X: tuple[int, ...]
    Y: tuple[int, ...]
    I: tuple
    condition: ConditionReport
    predicted: tuple | None
    measured: tuple
    verdict: SRGVerdict
    parameter_note: dict | None

    def to_dict(self) -> dict:
        return {
            "q": self.q, "m": self.m, "N": self.N, "M": self.M,
            "I1": list(self.I[0]), "I2": list(self.I[1]), "I3": list(self.I[2]),
            "partition": {"S1": list(self.S1), "S2": list(self.S2)},
            "X": list(self.X), "Y": list(self.Y),
            "condition": self.condition.to_dict(),
            "predicted_spectrum": list(self.predicted) if self.predicted is not None else None,
            "measured_spectrum": list(self.measured),
            "prediction_matches": self.predicted is not None and list(self.predicted) == list(self.measured),
            "srg": self.verdict.to_dict(),
            "parameter_note": self.parameter_note,
        }


def parameter_note(verdict: SRGVerdict, qm: int) -> dict | None:
    """Compare measured (lambda, mu) with the two closed forms in circulation."""
    if not verdict.is_srg:
        return None
    r = verdict.theta
    nls = (r * r + 3 * r - qm, r * r + r)
    printed = (qm + r * r - 3 * r, r * r - r)
    got = (verdict.lam, verdict.mu)
    return {"r": r, "measured": list(got), "negative_latin_square_form": list(nls),
            "printed_form": list(printed), "matches_negative_latin_square": got == nls,
            "matches_printed": got == printed}


def evaluate(ctx: ConstructionContext, S1, S2, *, M: int | None = None, workers: int = 1) -> ConstructionResult:
    check_partition(S1, S2, ctx.I2)
    N = ctx.N
    X = derive_X(S1, S2, N)
    Y = build_YX(S1, S2, ctx.I1, N)
    if len(Y) != 2 * len(ctx.I2) + 4 * len(ctx.I1):
        raise InternalError("unexpected |Y_X|")
    report = check_condition(X, ctx.I2, ctx.small, N, ctx.hist_small(2 * N))
    measured = measure_spectrum(ctx.big, Y, N, ctx.hist_big(4 * N, workers))
    predicted = predict_spectrum(ctx, report) if report.holds else None
    v = ctx.big.q
    k = len(Y) * (v - 1) // (4 * N)
    verdict = classify_srg(measured, v, k)
    return ConstructionResult(q=ctx.q, m=ctx.m, N=N, M=M, S1=tuple(sorted(S1)), S2=tuple(sorted(S2)),
                              X=X, Y=Y, I=(ctx.I1, ctx.I2, ctx.I3), condition=report,
                              predicted=tuple(predicted) if predicted is not None else None,
                              measured=tuple(measured), verdict=verdict,
                              parameter_note=parameter_note(verdict, ctx.q_m))


def conic_partition(ctx: ConstructionContext, M: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Partition of I2 read off the conic: X_Q itself for M = 1, the quotient X_2 otherwise."""
    conic = lift_XQ(ctx.small)
    if M == 1:
        return partition_from_X(conic.X_Q, ctx.N)
    if ctx.ap is None:
        raise NotThreeValued("conic quotients need three-valued periods")
    quo = quotient_and_purity(ctx.small, conic, M, ctx.ap)
    return partition_from_X(quo.X2, ctx.N)


def construct(q: int, M: int, partition=None, *, budget: int = DEFAULT_BUDGET, cache_dir=None,
              workers: int = 1, big: FieldTable | None = None) -> ConstructionResult:
    """The m = 3 pipeline over F_{q^6} with N = (q^2+q+1)/M.

    ``partition`` is None for the conic-derived choice or an explicit (S1, S2).
    """
    p, e = prime_power(q)
    if p == 2:
        raise PreconditionError("q must be odd")
    n = q * q + q + 1
    if M < 1 or n % M:
        raise NotADivisor(f"{M} does not divide {n}")
    if (q**3) % 4 != 3:
        raise PreconditionError(f"q^3 = {q**3} is not 3 mod 4")
    ctx = make_context(q, 3, n // M, big=big, budget=budget, cache_dir=cache_dir)
    if M == 1:
        S = singer_set(ctx.small, e)
        if sorted(S.S) != sorted(ctx.I2):
            raise InternalError("for M = 1 the middle class should be the Singer set")
    S1, S2 = conic_partition(ctx, M) if partition is None else partition
    return evaluate(ctx, S1, S2, M=M, workers=workers)


# -- export ------------------------------------------------------------------

def write_export(path, p: int, f: int, N: int, Y) -> None:
    Path(path).write_text(f"{p} {f} {4 * N}\n{' '.join(str(y) for y in sorted(Y))}\n")


def read_export(path) -> tuple[int, int, int, tuple[int, ...]]:
    lines = Path(path).read_text().split("\n")
    try:
        p, f, n4 = (int(t) for t in lines[0].split())
        Y = tuple(int(t) for t in lines[1].split()) if len(lines) > 1 else ()
    except ValueError as exc:
        raise PreconditionError(f"malformed export file: {exc}") from None
    if n4 % 4 or any(not 0 <= y < n4 for y in Y):
        raise PreconditionError("export file has an invalid class modulus or index")
    return p, f, n4, Y


def write_adjacency(path, big: FieldTable, Y, N: int) -> int:
    """Edge list 'u v' (element codes, u < v). Returns the number of edges."""
    if big.q > ADJACENCY_LIMIT:
        raise BudgetExceeded(f"adjacency export refused for {big.q} > {ADJACENCY_LIMIT} vertices")
    D = connection_codes(big, Y, N)
    codes = np.arange(big.q)
    Dd = big.digits(D)
    lines = []
    for u in codes:
        nb = big.encode((big.digits(u) + Dd) % big.p)
        lines.extend(f"{u} {v}" for v in sorted(nb[nb > u].tolist()))
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))
    return len(lines)

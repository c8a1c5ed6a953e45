"""Cyclotomic classes, Gauss periods, Singer difference sets and Gauss sums."""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cycint import CyclotomicInteger, rational_rows
from .errors import EvenCharacteristic, NotADivisor, PreconditionError, SizeFormulaMismatch
from .field import ZERO, FieldTable, build_field, prime_power, relative_trace

_CHUNK = 1 << 22


def class_histogram(table: FieldTable, N: int, workers: int = 1) -> np.ndarray:
    """hist[i, t] = #{e : e = i mod N, Tr(gamma^e) = t}, shape (N, p).

    Row i is the coefficient vector of the Gauss period of class i.
    """
    q1 = table.q - 1
    if N < 1 or q1 % N:
        raise NotADivisor(f"{N} does not divide {q1}")
    p = table.p

    def part(bounds):
        lo, hi = bounds
        e = np.arange(lo, hi, dtype=np.int64)
        return np.bincount((e % N) * p + table.trace[lo:hi], minlength=N * p)

    ranges = [(lo, min(lo + _CHUNK, q1)) for lo in range(0, q1, _CHUNK)]
    if workers > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(part, ranges))
    else:
        parts = [part(r) for r in ranges]
    return np.sum(parts, axis=0).reshape(N, p)


def _log_base(q: int, qm: int) -> int:
    m, n = 0, 1
    while n < qm:
        n *= q
        m += 1
    if n != qm:
        raise PreconditionError(f"{qm} is not a power of {q}")
    return m


@dataclass(frozen=True)
class PeriodProfile:
    q: int
    m: int
    N: int
    values: tuple
    F_N: tuple[int, ...]
    I_map: dict

    @property
    def q_m(self) -> int:
        return self.q**self.m

    def to_dict(self, ap: APProfile | None = None) -> dict:
        return {
            "q": self.q,
            "m": self.m,
            "N": self.N,
            "values": list(self.values),
            "classes": {str(b): list(idx) for b, idx in sorted(self.I_map.items())},
            "ap": ap.to_dict() if ap is not None else None,
        }


@dataclass(frozen=True)
class APProfile:
    alpha: tuple[int, int, int]
    t: int
    I1: tuple[int, ...]
    I2: tuple[int, ...]
    I3: tuple[int, ...]
    k: int
    beta: tuple[int, int, int]

    def to_dict(self) -> dict:
        return {"alpha": list(self.alpha), "t": self.t, "I1": list(self.I1),
                "I2": list(self.I2), "I3": list(self.I3)}


def gauss_periods(table: FieldTable, N: int, q: int | None = None, *,
                  allow_irrational: bool = False, hist: np.ndarray | None = None,
                  workers: int = 1) -> PeriodProfile:
    """Gauss periods of order N of ``table`` viewed as an extension of F_q.

    Irrational periods raise NotRational unless ``allow_irrational``, in which
    case they are reported as None.
    """
    q = table.p if q is None else q
    m = _log_base(q, table.q)
    if hist is None:
        hist = class_histogram(table, N, workers)
    rational = np.all(hist[:, 1:] == hist[:, 1:2], axis=1)
    if allow_irrational:
        values = tuple(int(r[0] - r[1]) if ok else None for r, ok in zip(hist, rational))
    else:
        values = tuple(int(v) for v in rational_rows(hist))
    F_N, I_map = (), {}
    ratio = (table.q - 1) // (q - 1) if q > 1 else 0
    if all(v is not None for v in values) and ratio % N == 0:
        offset = ratio // N
        betas = []
        for v in values:
            beta, r = divmod(v + offset, q)
            if r or beta < 0:
                raise SizeFormulaMismatch(f"period {v} is not of the form -{offset} + q*beta")
            betas.append(beta)
        F_N = tuple(sorted(set(betas)))
        I_map = {b: tuple(i for i, x in enumerate(betas) if x == b) for b in F_N}
    return PeriodProfile(q=q, m=m, N=N, values=values, F_N=F_N, I_map=I_map)


def ap_class_sizes(N: int, k: int, alpha2: int, t: int) -> tuple[Fraction, Fraction, Fraction]:
    """Sizes of the three level sets of a three-valued AP period profile."""
    a = alpha2
    s1 = Fraction(N * (a * a - a * t + k) + 2 * a - k - t + 1, 2 * t * t)
    s2 = Fraction(N * (t * t - a * a - k) - 1 - 2 * a + k, t * t)
    s3 = Fraction(N * (a * a + a * t + k) + 2 * a - k + t + 1, 2 * t * t)
    return s1, s2, s3


def detect_three_valued_ap(profile: PeriodProfile) -> APProfile | None:
    if any(v is None for v in profile.values):
        return None
    distinct = sorted(set(profile.values), reverse=True)
    if len(distinct) != 3:
        return None
    a1, a2, a3 = distinct
    if a1 - a2 != a2 - a3:
        return None
    t = a1 - a2
    N, q, qm = profile.N, profile.q, profile.q_m
    k = (qm - 1) // N
    sets = tuple(tuple(i for i, v in enumerate(profile.values) if v == a) for a in distinct)
    expected = ap_class_sizes(N, k, a2, t)
    if tuple(Fraction(len(s)) for s in sets) != expected:
        raise SizeFormulaMismatch(
            f"class sizes {[len(s) for s in sets]} disagree with closed forms {[str(x) for x in expected]}")
    offset = Fraction(qm - 1, q * N * (q - 1))
    betas = tuple(Fraction(a, q) + offset for a in distinct)
    if any(b.denominator != 1 or b < 0 for b in betas):
        raise SizeFormulaMismatch(f"multiplicities {betas} are not non-negative integers")
    return APProfile(alpha=(a1, a2, a3), t=t, I1=sets[0], I2=sets[1], I3=sets[2], k=k,
                     beta=tuple(int(b) for b in betas))


def three_family_sizes(q: int, M: int) -> tuple[int, int, int]:
    """Level-set sizes when the order-(q^2+q+1)/M periods of F_{q^3} are -M+2q, -M+q, -M."""
    return (M - 1) // 2, q - M + 2, (q * q + q + 1) // M - q + (M - 3) // 2


@dataclass(frozen=True)
class SingerData:
    q: int
    m: int
    S: tuple[int, ...]

    @property
    def modulus(self) -> int:
        return (self.q**self.m - 1) // (self.q - 1)

    def to_dict(self) -> dict:
        return {"q": self.q, "m": self.m, "modulus": self.modulus, "size": len(self.S),
                "S": list(self.S)}


def singer_set(table: FieldTable, sub_degree: int) -> SingerData:
    """{i mod (q^m-1)/(q-1) : Tr_{q^m/q}(omega^i) = 0} with q = p^sub_degree."""
    if sub_degree < 1 or table.f % sub_degree:
        raise NotADivisor(f"{sub_degree} does not divide {table.f}")
    q = table.p**sub_degree
    m = table.f // sub_degree
    if m < 2:
        raise PreconditionError("Singer sets need m >= 2")
    n = (table.q - 1) // (q - 1)
    codes = relative_trace(table, q, np.arange(n, dtype=np.int64))
    S = tuple(int(i) for i in np.flatnonzero(codes == 0))
    expected = (q ** (m - 1) - 1) // (q - 1)
    if len(S) != expected:
        raise SizeFormulaMismatch(f"|S| = {len(S)}, expected {expected}")
    return SingerData(q=q, m=m, S=S)


def reduce_multiset(indices, N: int, modulus: int | None = None) -> tuple[int, ...]:
    """Multiplicity of each residue mod N in the reduction of ``indices``."""
    if isinstance(indices, SingerData):
        modulus = indices.modulus
        indices = indices.S
    if modulus is not None and modulus % N:
        raise NotADivisor(f"{N} does not divide {modulus}")
    counts = np.bincount(np.asarray(indices, dtype=np.int64) % N, minlength=N)
    return tuple(int(c) for c in counts)


def _moore_nonzero(table: FieldTable, q: int, a: int, b: int, c: int) -> bool:
    # det [[a, b, c], [a^q, b^q, c^q], [a^{q^2}, b^{q^2}, c^{q^2}]] != 0 iff a, b, c
    # are linearly independent over F_q
    fr = [[table.power(x, q**j) for x in (a, b, c)] for j in range(3)]
    total = ZERO
    for perm in itertools.permutations(range(3)):
        term = table.mul(table.mul(fr[0][perm[0]], fr[1][perm[1]]), fr[2][perm[2]])
        inversions = sum(1 for i in range(3) for j in range(i + 1, 3) if perm[i] > perm[j])
        total = table.add(total, table.neg(term) if inversions % 2 else term)
    return total != ZERO


def lin_indep_hypothesis(q: int, M: int, table: FieldTable | None = None) -> bool:
    """Whether every three of omega^{jN}, 0 <= j < M, are linearly independent over F_q."""
    n = q * q + q + 1
    if M < 3 or n % M:
        raise NotADivisor(f"{M} does not divide {n} (or M < 3)")
    if table is None:
        p, e = prime_power(q)
        table = build_field(p, 3 * e)
    elif table.q != q**3:
        raise PreconditionError("table must be F_{q^3}")
    N = (q**3 - 1) // (M * (q - 1))
    elems = [j * N for j in range(M)]
    return all(_moore_nonzero(table, q, a, b, c) for a, b, c in itertools.combinations(elems, 3))


def quadratic_gauss_sum_exact(table: FieldTable) -> CyclotomicInteger:
    """sum_{x != 0} eta(x) zeta_p^{Tr(x)} as an exact cyclotomic integer."""
    if table.p == 2:
        raise EvenCharacteristic("quadratic character needs odd characteristic")
    hist = class_histogram(table, 2)
    return CyclotomicInteger(table.p, hist[0] - hist[1])


def gauss_sum_numeric(table: FieldTable, d: int, j: int) -> complex:
    """G(chi) for chi(gamma^e) = exp(2 pi i j e / d), in double precision."""
    if d < 1 or (table.q - 1) % d:
        raise NotADivisor(f"{d} does not divide {table.q - 1}")
    hist = class_histogram(table, d)
    zeta_p = np.exp(2j * np.pi * np.arange(table.p) / table.p)
    periods = hist @ zeta_p
    chi = np.exp(2j * np.pi * j * np.arange(d) / d)
    return complex(np.sum(chi * periods))


def period_vectors(table: FieldTable, N: int, hist: np.ndarray | None = None) -> list[CyclotomicInteger]:
    if hist is None:
        hist = class_histogram(table, N)
    return [CyclotomicInteger(table.p, row) for row in hist]


__all__ = [
    "APProfile", "PeriodProfile", "SingerData", "ap_class_sizes", "class_histogram",
    "detect_three_valued_ap", "gauss_periods", "gauss_sum_numeric", "lin_indep_hypothesis",
    "period_vectors", "quadratic_gauss_sum_exact", "reduce_multiset", "singer_set",
    "three_family_sizes",
]

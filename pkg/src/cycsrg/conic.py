"""The conic Q(x) = Tr(x^2) of PG(2, q), its lifted partition and quotients.

PG(2, q) is modelled on F_{q^3}: the point <omega^i> is the index i mod
q^2+q+1.  All sets are sorted lists of indices.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cyclotomy import APProfile, class_histogram, detect_three_valued_ap, gauss_periods
from .cyclotomy import quadratic_gauss_sum_exact
from .cycint import cyclo_complex, rational_rows
from .errors import (
    BaseNotOnConic,
    EvenCharacteristic,
    InternalError,
    NotADivisor,
    NotQualifying,
    NotThreeValued,
    PreconditionError,
)
from .field import ZERO, FieldTable, eta, relative_trace


def ground_order(table: FieldTable) -> int:
    """q such that ``table`` is F_{q^3}."""
    if table.f % 3:
        raise PreconditionError(f"F_{table.p}^{table.f} is not a cubic extension")
    q = table.p ** (table.f // 3)
    if q % 2 == 0:
        raise EvenCharacteristic("the conic construction needs odd q")
    return q


def epsilon(q: int) -> int:
    return 1 if q % 4 == 1 else -1


@dataclass(frozen=True)
class ConicData:
    q: int
    W_Q: tuple[int, ...]
    W_s: tuple[int, ...]
    W_n: tuple[int, ...]
    X_Q: tuple[int, ...]
    E1: tuple[int, ...]
    E2: tuple[int, ...]
    d0: int

    @property
    def n(self) -> int:
        return self.q * self.q + self.q + 1

    def to_dict(self) -> dict:
        return {"q": self.q, "d0": self.d0, "W_Q": list(self.W_Q), "W_s": list(self.W_s),
                "W_n": list(self.W_n), "X_Q": list(self.X_Q), "E1": list(self.E1),
                "E2": list(self.E2)}


def _square_trace_codes(table: FieldTable, q: int) -> np.ndarray:
    n = q * q + q + 1
    return relative_trace(table, q, 2 * np.arange(n, dtype=np.int64))


def conic_points(table: FieldTable) -> tuple[int, ...]:
    """W_Q = {i mod q^2+q+1 : Tr(omega^{2i}) = 0}."""
    q = ground_order(table)
    codes = _square_trace_codes(table, q)
    W = tuple(int(i) for i in np.flatnonzero(codes == 0))
    if len(W) != q + 1:
        raise InternalError(f"conic has {len(W)} points, expected {q + 1}")
    return W


def line_split(table: FieldTable) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(W_s, W_n): indices whose Tr(omega^{2i}) is a nonzero square / nonsquare of F_q."""
    q = ground_order(table)
    codes = _square_trace_codes(table, q)
    nz = np.flatnonzero(codes != 0)
    # Tr values lie in F_q^*, whose logs are multiples of the odd q^2+q+1, so
    # parity of the big-field log is the F_q quadratic character
    parity = table.log[codes[nz]] % 2
    return (tuple(int(i) for i in nz[parity == 0]), tuple(int(i) for i in nz[parity == 1]))


def lift_XQ(table: FieldTable, d0: int | None = None, *, normalize: bool = True,
            W_Q=None) -> ConicData:
    """Logs mod 2(q^2+q+1) of {omega^{d_i} Tr(omega^{d0+d_i})} together with 2 omega^{d0}.

    With ``normalize`` the representative among X_Q and X_Q + (q^2+q+1) is the
    one whose lift of d0 is even.
    """
    q = ground_order(table)
    n = q * q + q + 1
    q1 = table.q - 1
    W = tuple(W_Q) if W_Q is not None else conic_points(table)
    if d0 is None:
        d0 = W[0]
    if d0 % n not in W:
        raise BaseNotOnConic(f"{d0} is not on the conic")
    d0 %= n
    others = np.array([d for d in W if d != d0], dtype=np.int64)
    t = relative_trace(table, q, d0 + others)
    if np.any(t == 0):
        raise InternalError("tangent line at d0 meets the conic twice")
    lifts = (others + table.log[t]) % q1
    base = (table.constant(2) + d0) % q1
    lifts = np.concatenate(([base], lifts)) % (2 * n)
    if normalize and lifts[0] % 2:
        lifts = (lifts + n) % (2 * n)
    X = tuple(sorted(int(x) for x in lifts))
    if len(set(X)) != len(X) or sorted(x % n for x in X) != sorted(W):
        raise InternalError("X_Q does not reduce to W_Q")
    E1 = tuple(sorted(x // 2 for x in X if x % 2 == 0))
    E2 = tuple(sorted(((x - n) // 2) % n for x in X if x % 2 == 1))
    W_s, W_n = line_split(table)
    return ConicData(q=q, W_Q=W, W_s=W_s, W_n=W_n, X_Q=X, E1=E1, E2=E2, d0=d0)


# -- character-value checks --------------------------------------------------

def conic_character_values(table: FieldTable, conic: ConicData, hist=None) -> tuple[list[int], list[int]]:
    """psi(omega^c D_1) for c in Z_{q^2+q+1}: (measured by character sums, closed form)."""
    n, q = conic.n, conic.q
    if hist is None:
        hist = class_histogram(table, n)
    periods = rational_rows(hist)
    W = np.array(conic.W_Q)
    c = np.arange(n)
    measured = periods[(c[:, None] + W[None, :]) % n].sum(axis=1)
    eps = epsilon(q)
    member = {**{i: -1 for i in conic.W_Q}, **{i: -1 + eps * q for i in conic.W_s},
              **{i: -1 - eps * q for i in conic.W_n}}
    return [int(v) for v in measured], [member[int(i)] for i in c]


def main2_character_values(table: FieldTable, conic: ConicData, hist=None) -> tuple[np.ndarray, np.ndarray]:
    """psi(omega^c D_{1,1}) for c in Z_{2(q^2+q+1)}: (measured, closed form), complex."""
    n, q = conic.n, conic.q
    if hist is None:
        hist = class_histogram(table, 2 * n)
    zeta = np.exp(2j * np.pi * np.arange(table.p) / table.p)
    periods = hist @ zeta
    X = np.array(conic.X_Q)
    c = np.arange(2 * n)
    measured = periods[(c[:, None] + X[None, :]) % (2 * n)].sum(axis=1)
    G = cyclo_complex(quadratic_gauss_sum_exact(table))
    eps = epsilon(q)
    e2 = eta(table, table.constant(2))
    Xs, Ws, Wn = set(conic.X_Q), set(conic.W_s), set(conic.W_n)
    expected = np.empty(2 * n, dtype=complex)
    for ci in c:
        r = int(ci) % n
        if r in Ws:
            expected[ci] = (-1 + eps * q) / 2
        elif r in Wn:
            expected[ci] = (-1 - eps * q) / 2
        elif int(ci) in Xs:
            expected[ci] = (-1 + eps * e2 * G) / 2
        else:
            expected[ci] = (-1 - eps * e2 * G) / 2
    return measured, expected


# -- quotients and purity -----------------------------------------------------

@dataclass(frozen=True)
class QuotientData:
    q: int
    M: int
    N: int
    X1: tuple[int, ...]
    X2: tuple[int, ...]
    pure: bool
    ap: APProfile
    g_values: dict = field(default_factory=dict)
    ell: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"M": self.M, "N": self.N, "X1": list(self.X1), "X2": list(self.X2),
                "pure": self.pure, "g_values": {str(u): v for u, v in sorted(self.g_values.items())},
                "ell": {str(u): v for u, v in sorted(self.ell.items())}}


def _half(indices, N):
    h = pow(2, -1, N)
    return {(h * i) % N for i in indices}


def quotient_and_purity(table: FieldTable, conic: ConicData, M: int,
                        ap: APProfile | None = None) -> QuotientData:
    n = conic.n
    if M < 1 or n % M:
        raise NotADivisor(f"{M} does not divide {n}")
    N = n // M
    if ap is None:
        ap = detect_three_valued_ap(gauss_periods(table, N, conic.q))
        if ap is None:
            raise NotThreeValued(f"order-{N} periods of F_{conic.q}^3 are not a three-valued AP")
    half1, half2 = _half(ap.I1, N), _half(ap.I2, N)
    X1 = tuple(sorted(x % (2 * N) for x in conic.X_Q if x % N in half1))
    X2 = tuple(sorted(x % (2 * N) for x in conic.X_Q if x % N in half2))
    if len(set(X2)) != len(X2):
        raise InternalError("X_2 has a repeated element")
    if sorted(x % N for x in X1) != sorted(2 * list(half1)) or sorted(x % N for x in X2) != sorted(half2):
        raise InternalError("quotients do not reduce to 2^{-1}(I_1 + I_1) and 2^{-1}I_2")
    g_values, ell = {}, {}
    for u in conic.W_Q:
        if u % N in half1:
            ell[u] = ell_u(conic, M, u)
            g_values[u] = g_M_character(table, M, u, conic=conic, half_I1=half1)
    return QuotientData(q=conic.q, M=M, N=N, X1=X1, X2=X2, pure=len(set(X1)) == len(X1),
                        ap=ap, g_values=g_values, ell=ell)


def ell_u(conic: ConicData, M: int, u: int) -> int:
    """The unique l in 1..M-1 with u + l N on the conic."""
    n = conic.n
    N = n // M
    W = set(conic.W_Q)
    hits = [l for l in range(1, M) if (u + l * N) % n in W]
    if len(hits) != 1:
        raise NotQualifying(f"u={u} has {len(hits)} partners on the conic, expected exactly one")
    return hits[0]


def g_M_character(table: FieldTable, M: int, u: int, *, conic: ConicData | None = None,
                  half_I1=None) -> int:
    """eta(g_M(omega^u)) from the definition Tr(omega^{2u + l N}) omega^{l N}."""
    if conic is None:
        conic = lift_XQ(table)
    q, n = conic.q, conic.n
    N = n // M
    if u % n not in conic.W_Q:
        raise NotQualifying(f"{u} is not on the conic")
    if half_I1 is None:
        ap = detect_three_valued_ap(gauss_periods(table, N, q))
        if ap is None:
            raise NotThreeValued(f"order-{N} periods are not a three-valued AP")
        half_I1 = _half(ap.I1, N)
    if u % N not in half_I1:
        raise NotQualifying(f"{u} mod {N} is not in 2^-1 I_1")
    l = ell_u(conic, M, u)
    tr = int(relative_trace(table, q, np.array([2 * u + l * N]))[0])
    if tr == 0:
        raise InternalError("g_M vanished")
    g = table.mul(int(table.log[tr]), l * N)
    return eta(table, g)


def g_M_closed_form(table: FieldTable, M: int, ell: int) -> int:
    """eta(-1) eta(1 - omega^{l(q+1)(q^3-1)/M}) eta(1 - omega^{2 l q (q^3-1)/M})."""
    q = ground_order(table)
    step = (table.q - 1) // M
    out = eta(table, table.neg(0))
    for e in (ell * (q + 1) * step, 2 * ell * q * step):
        x = table.sub(0, e % (table.q - 1))
        if x == ZERO:
            raise InternalError("1 - omega^e vanished")
        out *= eta(table, x)
    return out


def g_M_congruence_value(q: int, M: int) -> int | None:
    """Value of eta(g_M) predicted by congruence conditions on q, when they apply."""
    if M == 3 and q % 6 == 1:
        return 1 if q % 12 == 1 else -1
    if M == 7 and q % 14 in (9, 11):
        return 1
    return None


def purity_congruence(q: int, M: int) -> bool:
    """Sufficient congruence conditions on q for X_1 to be pure."""
    if M == 3:
        return q % 24 in (7, 13)
    if M == 7:
        return q % 56 in (11, 37, 51, 53)
    return False

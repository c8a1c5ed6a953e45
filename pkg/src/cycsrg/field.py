"""Finite fields F_{p^f} in discrete-log representation.

Elements are referred to by their exponent with respect to a fixed primitive
element gamma; the zero element is the sentinel ``ZERO``.  Internally every
element also has an integer *code* sum_i c_i p^i built from its coefficient
vector in the polynomial basis, which is only used to add elements.
"""
from __future__ import annotations

import itertools
import struct
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from sympy import factorint, isprime

from .errors import (
    BudgetExceeded,
    CacheError,
    EvenCharacteristic,
    NotADivisor,
    NotPrime,
    PolynomialReducible,
    PreconditionError,
    ZeroArgument,
)

ZERO = -1
OUTSIDE = -2
DEFAULT_BUDGET = 2**31
CACHE_MAGIC = b"CYCSRG1"


# -- polynomials over F_p, coefficient lists with the constant term first ----

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymod(a, mod, p):
    a = [x % p for x in a]
    n = len(mod) - 1
    inv_lead = pow(mod[-1], -1, p)
    for i in range(len(a) - 1, n - 1, -1):
        c = a[i] * inv_lead % p
        if c:
            for j in range(n + 1):
                a[i - n + j] = (a[i - n + j] - c * mod[j]) % p
    return _trim(a[:n]) if len(a) >= n else _trim(a)


def _polymulmod(a, b, mod, p):
    if not a or not b:
        return []
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    return _polymod(prod, mod, p)


def _polypowmod(a, k, mod, p):
    result = [1]
    base = _polymod(a, mod, p)
    while k:
        if k & 1:
            result = _polymulmod(result, base, mod, p)
        base = _polymulmod(base, base, mod, p)
        k >>= 1
    return result


def _polysub(a, b, p):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _polygcd(a, b, p):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _polymod(a, b, p)
    return a


def is_irreducible(poly, p) -> bool:
    """Rabin's irreducibility test for a monic polynomial over F_p."""
    poly = [c % p for c in poly]
    f = len(poly) - 1
    if f < 1 or poly[-1] != 1:
        return False
    if f == 1:
        return True
    if poly[0] == 0:
        return False
    x = [0, 1]
    frob = {}
    cur = x
    for k in range(1, f + 1):
        cur = _polypowmod(cur, p, poly, p)
        frob[k] = cur
    if _polysub(frob[f], x, p):
        return False
    for r in factorint(f):
        if len(_polygcd(_polysub(frob[f // r], x, p), poly, p)) > 1:
            return False
    return True


def least_irreducible(p: int, f: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree f (constant term compared first)."""
    for low in itertools.product(range(p), repeat=f):
        poly = (*low, 1)
        if is_irreducible(poly, p):
            return poly
    raise PolynomialReducible(f"no irreducible polynomial of degree {f} over F_{p}")  # unreachable


def _has_full_order(g, poly, p, q1, prime_factors) -> bool:
    if _polypowmod(g, q1, poly, p) != [1]:
        return False
    return all(_polypowmod(g, q1 // r, poly, p) != [1] for r in prime_factors)


def _mulx(col, poly, p):
    f = len(poly) - 1
    top = col[-1]
    out = [0] + list(col[:-1])
    return [(out[i] - top * poly[i]) % p for i in range(f)]


def _mul_matrix(g, poly, p) -> np.ndarray:
    """Matrix of multiplication by g in the basis 1, x, ..., x^{f-1}."""
    f = len(poly) - 1
    col = list(g) + [0] * (f - len(g))
    cols = []
    for _ in range(f):
        cols.append(col)
        col = _mulx(col, poly, p)
    return np.array(cols, dtype=np.int64).T


def _power_digits(step: np.ndarray, q1: int, p: int) -> np.ndarray:
    """Coefficient vectors of gamma^e for 0 <= e < q1 by repeated doubling."""
    f = step.shape[0]
    v = np.zeros((q1, f), dtype=np.int64)
    v[0, 0] = 1
    k = 1
    while k < q1:
        n = min(k, q1 - k)
        v[k:k + n] = (v[:n] @ step.T) % p
        k += n
        if k < q1:
            step = (step @ step) % p
    return v


@dataclass(frozen=True)
class FieldSpec:
    p: int
    f: int
    poly: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p**self.f


@dataclass(frozen=True, eq=False)
class FieldTable:
    """Log/antilog/trace tables of F_{p^f}.

    ``antilog[e]`` is the code of gamma^e, ``log[code]`` the exponent (``ZERO``
    for 0, ``OUTSIDE`` for codes that are not in this field, which happens for
    subfield views), ``trace[e]`` is Tr_{q/p}(gamma^e).
    """

    p: int
    f: int
    spec: FieldSpec | None
    antilog: np.ndarray
    log: np.ndarray
    trace: np.ndarray
    dim: int

    @property
    def q(self) -> int:
        return self.p**self.f

    @property
    def order(self) -> int:
        return self.q

    @property
    def gamma(self) -> int:
        return int(self.antilog[1 % (self.q - 1)])

    def __repr__(self):
        return f"FieldTable(p={self.p}, f={self.f}, gamma_code={self.gamma})"

    # -- codes -------------------------------------------------------------
    def digits(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        out = np.empty(codes.shape + (self.dim,), dtype=np.int64)
        rest = codes.copy()
        for i in range(self.dim):
            rest, out[..., i] = np.divmod(rest, self.p)
        return out

    def encode(self, digits) -> np.ndarray:
        digits = np.asarray(digits, dtype=np.int64)
        weights = self.p ** np.arange(self.dim, dtype=np.int64)
        return digits @ weights

    def add_codes(self, a, b) -> np.ndarray:
        return self.encode((self.digits(a) + self.digits(b)) % self.p)

    def code(self, e) -> np.ndarray | int:
        """Code of gamma^e; ``ZERO`` maps to code 0.  Vectorized."""
        e = np.asarray(e, dtype=np.int64)
        out = np.where(e == ZERO, 0, self.antilog[np.where(e == ZERO, 0, e) % (self.q - 1)])
        return int(out) if out.ndim == 0 else out

    def exp_of(self, code) -> np.ndarray | int:
        out = self.log[np.asarray(code, dtype=np.int64)]
        if np.any(out == OUTSIDE):
            raise PreconditionError("code does not represent an element of this field")
        return int(out) if np.ndim(out) == 0 else out

    # -- arithmetic in log representation ------------------------------------
    def add(self, e1, e2):
        return self.exp_of(self.add_codes(self.code(e1), self.code(e2)))

    def neg(self, e):
        if self.p == 2:
            return e
        e = np.asarray(e, dtype=np.int64)
        out = np.where(e == ZERO, ZERO, (e + (self.q - 1) // 2) % (self.q - 1))
        return int(out) if out.ndim == 0 else out

    def sub(self, e1, e2):
        return self.add(e1, self.neg(e2))

    def mul(self, e1, e2):
        e1 = np.asarray(e1, dtype=np.int64)
        e2 = np.asarray(e2, dtype=np.int64)
        out = np.where((e1 == ZERO) | (e2 == ZERO), ZERO, (e1 + e2) % (self.q - 1))
        return int(out) if out.ndim == 0 else out

    def power(self, e, k: int):
        if e == ZERO:
            if k <= 0:
                raise ZeroArgument("zero has no non-positive powers")
            return ZERO
        return (e * k) % (self.q - 1)

    def inv(self, e):
        if e == ZERO:
            raise ZeroArgument("zero has no inverse")
        return (-e) % (self.q - 1)

    def constant(self, c: int) -> int:
        """Exponent of the prime-field constant c."""
        return self.exp_of(c % self.p)

    def zech(self, e: int) -> int:
        """log(1 + gamma^e)."""
        return self.add(0, e)

    def trace_exp(self, e) -> int:
        return 0 if e == ZERO else int(self.trace[e % (self.q - 1)])

    def conjugate_sum(self, exps, d: int) -> np.ndarray:
        """Codes of sum_{j < f/d} x^{p^{dj}} for x = gamma^exps (ZERO allowed)."""
        if self.f % d:
            raise NotADivisor(f"{d} does not divide {self.f}")
        exps = np.asarray(exps, dtype=np.int64)
        q1 = self.q - 1
        is_zero = exps == ZERO
        base = np.where(is_zero, 0, exps)
        acc = np.zeros(exps.shape + (self.dim,), dtype=np.int64)
        frob = pow(self.p, d, q1) if q1 > 1 else 0
        mult = 1
        for _ in range(self.f // d):
            acc += self.digits(self.antilog[(base * mult) % q1])
            mult = (mult * frob) % q1 if q1 > 1 else 0
        codes = self.encode(acc % self.p)
        return np.where(is_zero, 0, codes)


def _budget_check(p, f, budget):
    if p**f > budget:
        raise BudgetExceeded(f"F_{p}^{f} has {p**f} elements, budget is {budget}")


def build_field(p: int, f: int = 1, poly=None, *, budget: int = DEFAULT_BUDGET,
                cache_dir=None) -> FieldTable:
    """Build log/antilog/trace tables for F_{p^f}.

    Without ``poly`` the lexicographically least monic irreducible is used.
    gamma is the least element of full order in the same ordering.
    """
    if not isprime(p):
        raise NotPrime(f"{p} is not prime")
    if f < 1:
        raise PreconditionError("degree must be at least 1")
    _budget_check(p, f, budget)
    if poly is None:
        poly = least_irreducible(p, f)
    else:
        poly = tuple(int(c) % p for c in poly)
        if len(poly) != f + 1 or poly[-1] != 1:
            raise PolynomialReducible(f"polynomial must be monic of degree {f}")
        if not is_irreducible(poly, p):
            raise PolynomialReducible(f"{poly} is reducible over F_{p}")
    spec = FieldSpec(p, f, tuple(poly))
    q = p**f
    q1 = q - 1
    factors = list(factorint(q1)) if q1 > 1 else []

    gamma = None
    for cand in itertools.product(range(p), repeat=f):
        g = _trim(cand)
        if g and _has_full_order(g, poly, p, q1, factors):
            gamma = g
            break
    if gamma is None:
        raise PolynomialReducible(f"{poly} admits no element of order {q1}")

    v = _power_digits(_mul_matrix(gamma, poly, p), q1, p)
    weights = p ** np.arange(f, dtype=np.int64)
    antilog = v @ weights

    log = np.full(q, OUTSIDE, dtype=np.int64)
    log[0] = ZERO
    log[antilog] = np.arange(q1, dtype=np.int64)
    if np.any(log == OUTSIDE):
        raise PolynomialReducible(f"{poly}: powers of gamma do not exhaust the field")

    trace = None
    cache_path = _cache_path(cache_dir, spec) if cache_dir is not None else None
    if cache_path is not None and cache_path.exists():
        try:
            cached_spec, cached = read_trace_cache(cache_path)
            if cached_spec == spec:
                trace = cached[1:]
        except CacheError:
            trace = None
    if trace is None:
        # Tr(x^j) is the trace of the multiplication-by-x^j matrix
        mx = _mul_matrix([0, 1] if f > 1 else [0], poly, p)
        basis_tr = np.empty(f, dtype=np.int64)
        power = np.eye(f, dtype=np.int64)
        for j in range(f):
            basis_tr[j] = np.trace(power) % p
            power = (power @ mx) % p
        trace = (v @ basis_tr) % p
    del v
    trace = np.ascontiguousarray(trace, dtype=np.int64)

    for arr in (antilog, log, trace):
        arr.setflags(write=False)
    table = FieldTable(p=p, f=f, spec=spec, antilog=antilog, log=log, trace=trace, dim=f)
    if cache_path is not None and not cache_path.exists():
        write_trace_cache(table, cache_path)
    return table


@dataclass(eq=False)
class SubfieldMap:
    big: FieldTable
    sub_degree: int
    stride: int

    def embed(self, j):
        """Exponent in the big field of (gamma^stride)^j."""
        j = np.asarray(j, dtype=np.int64)
        out = np.where(j == ZERO, ZERO, (j * self.stride) % (self.big.q - 1))
        return int(out) if out.ndim == 0 else out

    def image(self) -> np.ndarray:
        """Codes of the subfield elements, zero included."""
        return np.concatenate(([0], self.table.antilog))

    @cached_property
    def table(self) -> FieldTable:
        """The subfield as a table of its own, with primitive element gamma^stride.

        Codes are shared with the big field, so addition needs no translation.
        """
        big, d = self.big, self.sub_degree
        q1 = big.p**d - 1
        antilog = big.antilog[(np.arange(q1, dtype=np.int64) * self.stride) % (big.q - 1)]
        log = np.full(len(big.log), OUTSIDE, dtype=np.int64)
        log[0] = ZERO
        log[antilog] = np.arange(q1, dtype=np.int64)
        view = FieldTable(p=big.p, f=d, spec=None, antilog=antilog, log=log,
                          trace=np.zeros(q1, dtype=np.int64), dim=big.dim)
        codes = view.conjugate_sum(np.arange(q1, dtype=np.int64), 1)
        if np.any(codes >= big.p) or np.any(codes < 0):
            raise PreconditionError("subfield trace left the prime field")
        trace = codes.astype(np.int64)
        for arr in (antilog, log, trace):
            arr.setflags(write=False)
        return FieldTable(p=big.p, f=d, spec=None, antilog=antilog, log=log,
                          trace=trace, dim=big.dim)


def subfield_map(big: FieldTable, sub_degree: int) -> SubfieldMap:
    if sub_degree < 1 or big.f % sub_degree:
        raise NotADivisor(f"{sub_degree} does not divide {big.f}")
    stride = (big.q - 1) // (big.p**sub_degree - 1)
    return SubfieldMap(big, sub_degree, stride)


def trace_to(big: FieldTable, x: int, sub_degree: int) -> int:
    """Relative trace to the degree-``sub_degree`` subfield, as an exponent of ``big``."""
    return big.exp_of(int(big.conjugate_sum(np.int64(x), sub_degree)))


def eta(table: FieldTable, x: int) -> int:
    """Quadratic character of gamma^x."""
    if table.p == 2:
        raise EvenCharacteristic("quadratic character needs odd characteristic")
    if x == ZERO:
        raise ZeroArgument("eta(0) is undefined")
    return 1 if x % 2 == 0 else -1


def relative_trace(table: FieldTable, q: int, exps) -> np.ndarray:
    """Tr_{table.q/q}(gamma^exps) as codes (elements of the subfield F_q)."""
    d = _degree_of(table.p, q)
    if d == 1:
        exps = np.asarray(exps, dtype=np.int64)
        return np.where(exps == ZERO, 0, table.trace[np.where(exps == ZERO, 0, exps) % (table.q - 1)])
    return table.conjugate_sum(exps, d)


def _degree_of(p: int, q: int) -> int:
    d, n = 0, 1
    while n < q:
        n *= p
        d += 1
    if n != q:
        raise PreconditionError(f"{q} is not a power of {p}")
    return d


def prime_power(q: int) -> tuple[int, int]:
    """(p, e) with q = p^e."""
    fac = factorint(q)
    if len(fac) != 1:
        raise NotPrime(f"{q} is not a prime power")
    (p, e), = fac.items()
    return int(p), int(e)


# -- trace cache -------------------------------------------------------------

def _cache_path(cache_dir, spec: FieldSpec) -> Path | None:
    if spec.p > 255:
        return None
    poly = "-".join(str(c) for c in spec.poly)
    return Path(cache_dir) / f"trace_{spec.p}_{spec.f}_{poly}.bin"


def write_trace_cache(table: FieldTable, path) -> None:
    """Layout: magic, p, f, poly (all <u8 little-endian), then p^f bytes:
    Tr(0) followed by Tr(gamma^e) in antilog order."""
    spec = table.spec
    if spec is None:
        raise CacheError("only primary tables can be cached")
    if spec.p > 255:
        raise CacheError("trace values do not fit a byte")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = CACHE_MAGIC + struct.pack(f"<{2 + len(spec.poly)}Q", spec.p, spec.f, *spec.poly)
    body = np.concatenate(([0], table.trace)).astype(np.uint8).tobytes()
    tmp = path.with_suffix(".tmp")
    tmp.write_bytes(header + body)
    tmp.replace(path)


def read_trace_cache(path) -> tuple[FieldSpec, np.ndarray]:
    raw = Path(path).read_bytes()
    if not raw.startswith(CACHE_MAGIC):
        raise CacheError(f"{path}: bad magic")
    off = len(CACHE_MAGIC)
    try:
        p, f = struct.unpack_from("<2Q", raw, off)
        off += 16
        poly = struct.unpack_from(f"<{f + 1}Q", raw, off)
        off += 8 * (f + 1)
    except struct.error as exc:
        raise CacheError(f"{path}: truncated header") from exc
    body = np.frombuffer(raw, dtype=np.uint8, offset=off)
    if len(body) != p**f:
        raise CacheError(f"{path}: expected {p**f} trace bytes, found {len(body)}")
    return FieldSpec(int(p), int(f), tuple(int(c) for c in poly)), body.astype(np.int64)

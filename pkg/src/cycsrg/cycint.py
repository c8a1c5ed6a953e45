"""Exact elements of Z[zeta_p] stored as length-p integer vectors."""
from __future__ import annotations

import numpy as np

from .errors import NotRational

try:
    import gmpy2
except ImportError:  # pragma: no cover
    gmpy2 = None

_DIRECT_LIMIT = 2048


def _canonical(c: np.ndarray) -> np.ndarray:
    # 1 + zeta + ... + zeta^{p-1} = 0, so constant shifts do not change the value
    c = c - c.min()
    c.setflags(write=False)
    return c


def _cyclic_convolve(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Exact cyclic convolution of two non-negative vectors of length p."""
    bound = int(a.max()) * int(b.max()) * p
    if bound == 0:
        return np.zeros(p, dtype=np.int64)
    if p <= _DIRECT_LIMIT and bound < 2**62:
        full = np.convolve(a, b)
    elif gmpy2 is not None and bound < 2**63:
        full = _kronecker(a, b, bound)
    else:
        full = np.convolve(a.astype(object), b.astype(object))
    out = np.zeros(p, dtype=full.dtype)
    out[:] = full[:p]
    out[: len(full) - p] += full[p:]
    return out.astype(np.int64)


def _kronecker(a: np.ndarray, b: np.ndarray, bound: int) -> np.ndarray:
    width = next(w for w in (1, 2, 4, 8) if bound < 2 ** (8 * w))
    dt = np.dtype(f"<u{width}")
    x = gmpy2.mpz(int.from_bytes(a.astype(dt).tobytes(), "little"))
    y = gmpy2.mpz(int.from_bytes(b.astype(dt).tobytes(), "little"))
    n = len(a) + len(b) - 1
    raw = int(x * y).to_bytes(n * width, "little")
    return np.frombuffer(raw, dtype=dt).astype(np.int64)


class CyclotomicInteger:
    """sum_t coeffs[t] * zeta_p^t, kept in canonical form (minimum coefficient 0)."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs):
        c = np.array(coeffs, dtype=np.int64)
        if c.shape != (p,):
            raise ValueError(f"expected {p} coefficients, got shape {c.shape}")
        self.p = p
        self.coeffs = _canonical(c)

    @classmethod
    def from_int(cls, p: int, n: int) -> CyclotomicInteger:
        c = np.zeros(p, dtype=np.int64)
        c[0] = n
        return cls(p, c)

    @classmethod
    def zeta(cls, p: int, t: int = 1) -> CyclotomicInteger:
        c = np.zeros(p, dtype=np.int64)
        c[t % p] = 1
        return cls(p, c)

    def is_rational(self) -> bool:
        return bool(np.all(self.coeffs[1:] == self.coeffs[1])) if self.p > 1 else True

    def __int__(self) -> int:
        return cyclo_rational(self)

    def __complex__(self) -> complex:
        return cyclo_complex(self)

    def _coerce(self, other):
        if isinstance(other, CyclotomicInteger):
            if other.p != self.p:
                raise ValueError("mismatched roots of unity")
            return other
        if isinstance(other, (int, np.integer)):
            return CyclotomicInteger.from_int(self.p, int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CyclotomicInteger(self.p, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicInteger(self.p, -self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CyclotomicInteger(self.p, self.coeffs - other.coeffs)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return CyclotomicInteger(self.p, self.coeffs * int(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CyclotomicInteger(self.p, _cyclic_convolve(self.coeffs, other.coeffs, self.p))

    __rmul__ = __mul__

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return bool(np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.p, self.coeffs.tobytes()))

    def __repr__(self):
        if self.is_rational():
            return f"CyclotomicInteger(p={self.p}, value={int(self)})"
        return f"CyclotomicInteger(p={self.p}, coeffs={self.coeffs.tolist()})"


def cyclo_rational(z: CyclotomicInteger) -> int:
    if not z.is_rational():
        raise NotRational(z.coeffs)
    return int(z.coeffs[0] - z.coeffs[1]) if z.p > 1 else int(z.coeffs[0])


def cyclo_complex(z: CyclotomicInteger) -> complex:
    t = np.arange(z.p)
    return complex(np.sum(z.coeffs * np.exp(2j * np.pi * t / z.p)))


def rational_rows(rows: np.ndarray) -> np.ndarray:
    """Vectorized cyclo_rational over the rows of an (n, p) coefficient matrix."""
    rows = np.asarray(rows, dtype=np.int64)
    bad = np.flatnonzero(np.any(rows[:, 1:] != rows[:, 1:2], axis=1))
    if len(bad):
        raise NotRational(rows[bad[0]], f"row {int(bad[0])} is not rational: {rows[bad[0]].tolist()}")
    return rows[:, 0] - rows[:, 1]

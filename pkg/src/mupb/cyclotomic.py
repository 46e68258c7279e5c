"""Exact arithmetic in the 12th cyclotomic field Q(zeta), zeta = exp(2*pi*i/12).

Elements are stored as four rational coordinates over {1, zeta, zeta^2, zeta^3},
reduced with the minimal polynomial zeta^4 - zeta^2 + 1 = 0.  The field holds
every root of unity used for qubit/qutrit bases: i = zeta^3, omega = zeta^4.

Unit vectors with irrational normalisation (1/sqrt(2), 1/sqrt(6), ...) are kept
exact by `ExactVector`, which stores unnormalised entries together with their
squared norm.
"""
from __future__ import annotations

import cmath
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

_ZETA_C = cmath.exp(2j * cmath.pi / 12)
_POWERS_C = tuple(_ZETA_C**k for k in range(4))


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass int or Fraction")
    return Fraction(x)


class Cyc12:
    """Element of Q(zeta_12)."""

    __slots__ = ("c",)

    def __init__(self, c0=0, c1=0, c2=0, c3=0):
        self.c = (_frac(c0), _frac(c1), _frac(c2), _frac(c3))

    @classmethod
    def _raw(cls, c) -> Cyc12:
        obj = cls.__new__(cls)
        obj.c = c
        return obj

    @classmethod
    def root(cls, k: int) -> Cyc12:
        """zeta**k for any integer k."""
        return _ROOTS[k % 12]

    @staticmethod
    def coerce(x) -> Cyc12:
        if isinstance(x, Cyc12):
            return x
        if isinstance(x, (int, Fraction)):
            return Cyc12(x)
        return NotImplemented

    def __repr__(self) -> str:
        return "Cyc12(%s)" % ", ".join(str(v) for v in self.c)

    def __str__(self) -> str:
        names = ("", "z", "z^2", "z^3")
        parts = [f"{v}{n and '*' + n}" for v, n in zip(self.c, names) if v]
        return " + ".join(parts) if parts else "0"

    def __hash__(self) -> int:
        return hash(self.c)

    def __eq__(self, other) -> bool:
        other = Cyc12.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.c == other.c

    def __bool__(self) -> bool:
        return any(self.c)

    def __add__(self, other):
        other = Cyc12.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.c, other.c
        return Cyc12._raw((a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]))

    __radd__ = __add__

    def __neg__(self) -> Cyc12:
        a = self.c
        return Cyc12._raw((-a[0], -a[1], -a[2], -a[3]))

    def __sub__(self, other):
        other = Cyc12.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = Cyc12.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = Cyc12.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a0, a1, a2, a3 = self.c
        b0, b1, b2, b3 = other.c
        c0 = a0 * b0
        c1 = a0 * b1 + a1 * b0
        c2 = a0 * b2 + a1 * b1 + a2 * b0
        c3 = a0 * b3 + a1 * b2 + a2 * b1 + a3 * b0
        c4 = a1 * b3 + a2 * b2 + a3 * b1
        c5 = a2 * b3 + a3 * b2
        c6 = a3 * b3
        # z^4 = z^2 - 1, z^5 = z^3 - z, z^6 = -1
        return Cyc12._raw((c0 - c4 - c6, c1 - c5, c2 + c4, c3 + c5))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Cyc12.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = Cyc12.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int) -> Cyc12:
        if n < 0:
            return self.inverse() ** (-n)
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self) -> Cyc12:
        a0, a1, a2, a3 = self.c
        return Cyc12._raw((a0 + a2, a1, -a2, -(a1 + a3)))

    def galois(self, k: int) -> Cyc12:
        """Image under the automorphism zeta -> zeta**k, gcd(k, 12) = 1."""
        if k % 2 == 0 or k % 3 == 0:
            raise ValueError("k must be coprime to 12")
        out = ZERO
        for j, a in enumerate(self.c):
            if a:
                out = out + _ROOTS[(j * k) % 12] * a
        return out

    def norm(self) -> Fraction:
        """Field norm (product of all Galois conjugates); rational."""
        n = self * self.galois(5) * self.galois(7) * self.galois(11)
        return n.c[0]

    def inverse(self) -> Cyc12:
        if not self:
            raise ZeroDivisionError("inverse of zero")
        rest = self.galois(5) * self.galois(7) * self.galois(11)
        n = (self * rest).c[0]
        return Cyc12._raw(tuple(v / n for v in rest.c))

    def abs2(self) -> Cyc12:
        return self * self.conj()

    def is_rational(self) -> bool:
        return not (self.c[1] or self.c[2] or self.c[3])

    def is_real(self) -> bool:
        return self == self.conj()

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.c[0]

    def __complex__(self) -> complex:
        return sum(float(v) * p for v, p in zip(self.c, _POWERS_C))

    def to_json(self) -> list:
        return [[v.numerator, v.denominator] for v in self.c]

    @classmethod
    def from_json(cls, data: Sequence) -> Cyc12:
        if len(data) != 4:
            raise ValueError("cyclotomic literal needs 4 coordinates")
        return cls(*(Fraction(int(n), int(d)) for n, d in data))


ZERO = Cyc12._raw((Fraction(0),) * 4)
ONE = Cyc12(1)


def _build_roots():
    roots = [ONE, Cyc12(0, 1), Cyc12(0, 0, 1), Cyc12(0, 0, 0, 1)]
    z = roots[1]
    while len(roots) < 12:
        roots.append(roots[-1] * z)
    return tuple(roots)


_ROOTS = _build_roots()

ZETA = _ROOTS[1]  # e^{2 pi i / 12}
I = _ROOTS[3]
OMEGA = _ROOTS[4]  # e^{2 pi i / 3}
SQRT3 = ZETA + ZETA.conj()


def cyc(x) -> Cyc12:
    return Cyc12.coerce(x) if not isinstance(x, Cyc12) else x


def as_object_matrix(rows: Iterable[Iterable]) -> np.ndarray:
    """Build an object-dtype matrix of Cyc12 from nested ints/Fractions/Cyc12."""
    rows = [[cyc(v) for v in row] for row in rows]
    out = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            out[i, j] = v
    return out


def to_complex_array(a: np.ndarray) -> np.ndarray:
    return np.vectorize(complex, otypes=[complex])(a)


def conj_array(a: np.ndarray) -> np.ndarray:
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        out[idx] = v.conj()
    return out


class ExactVector:
    """Unit vector entries/sqrt(norm2) with entries in Q(zeta_12).

    `norm2` is the exact squared length of `entries`; it is a positive real
    element of the field (rational for everything in the catalog).
    """

    __slots__ = ("entries", "norm2")

    def __init__(self, entries: Sequence, norm2=None):
        ent = np.empty(len(entries), dtype=object)
        for k, v in enumerate(entries):
            ent[k] = cyc(v)
        self.entries = ent
        computed = sum((v.abs2() for v in ent), ZERO)
        if norm2 is None:
            norm2 = computed
        else:
            norm2 = cyc(norm2)
            if norm2 != computed:
                raise ValueError("norm2 does not match the squared length of the entries")
        if not norm2:
            raise ValueError("zero vector")
        self.norm2 = norm2

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __repr__(self) -> str:
        return f"ExactVector([{', '.join(map(str, self.entries))}], norm2={self.norm2})"

    def to_complex(self) -> np.ndarray:
        v = to_complex_array(self.entries)
        return v / np.sqrt(complex(self.norm2).real)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactVector):
            return NotImplemented
        return self.dim == other.dim and self._same(other)

    def _same(self, other: ExactVector) -> bool:
        # v/sqrt(n) == w/sqrt(m)  <=>  v*sqrt(m) == w*sqrt(n); compare squares of
        # entrywise ratios and require the ratio to be a positive real.
        for a, b in zip(self.entries, other.entries):
            if bool(a) != bool(b):
                return False
        for a, b in zip(self.entries, other.entries):
            if a:
                r = a / b
                if not r.is_real() or complex(r).real <= 0:
                    return False
                if r.abs2() * other.norm2 != self.norm2:
                    return False
                return all((x * b) == (y * a) for x, y in zip(self.entries, other.entries))
        return True

    __hash__ = None

    def conj(self) -> ExactVector:
        return ExactVector([v.conj() for v in self.entries], self.norm2)

    def scaled(self, factor: Cyc12) -> ExactVector:
        """Multiply the raw entries by a nonzero field element (changes norm2)."""
        factor = cyc(factor)
        return ExactVector([v * factor for v in self.entries], self.norm2 * factor.abs2())

    def apply(self, matrix: np.ndarray, matrix_norm2=ONE) -> ExactVector:
        """Apply an exact matrix M/sqrt(matrix_norm2) with M an object array of Cyc12."""
        ent = matrix.dot(self.entries)
        return ExactVector(list(ent), self.norm2 * cyc(matrix_norm2))

    def to_json(self) -> dict:
        n2 = self.norm2
        norm = [n2.c[0].numerator, n2.c[0].denominator] if n2.is_rational() else {"cyc": n2.to_json()}
        return {"cyc": [v.to_json() for v in self.entries], "norm2": norm}

    @classmethod
    def from_json(cls, data: dict) -> ExactVector:
        entries = [Cyc12.from_json(v) for v in data["cyc"]]
        n2 = data.get("norm2")
        if n2 is None:
            return cls(entries)
        if isinstance(n2, dict):
            norm2 = Cyc12.from_json(n2["cyc"])
        else:
            norm2 = Cyc12(Fraction(int(n2[0]), int(n2[1])))
        return cls(entries, norm2)


class ScaledCyc:
    """Exact scalar num / sqrt(den2), as produced by inner products of ExactVectors."""

    __slots__ = ("num", "den2")

    def __init__(self, num: Cyc12, den2: Cyc12):
        self.num = num
        self.den2 = den2

    def abs2(self) -> Cyc12:
        return self.num.abs2() / self.den2

    def conj(self) -> ScaledCyc:
        return ScaledCyc(self.num.conj(), self.den2)

    def __complex__(self) -> complex:
        return complex(self.num) / complex(self.den2).real ** 0.5

    def __eq__(self, other) -> bool:
        if isinstance(other, ScaledCyc):
            # a/sqrt(m) == b/sqrt(n) with both ratios' squares compared and sign fixed
            if not self.num or not other.num:
                return not self.num and not other.num
            r = self.num / other.num
            return r.is_real() and complex(r).real > 0 and r.abs2() * other.den2 == self.den2
        if isinstance(other, (int, Fraction, Cyc12)):
            return self == ScaledCyc(cyc(other), ONE)
        return NotImplemented

    __hash__ = None

    def __repr__(self) -> str:
        return f"ScaledCyc({self.num} / sqrt({self.den2}))"

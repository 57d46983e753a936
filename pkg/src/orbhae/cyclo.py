"""Exact arithmetic in the cyclotomic field Q(zeta_5).

Elements are stored as coordinates in the basis 1, z, z^2, z^3 where
z = exp(2 pi i / 5); z^4 is eliminated through 1 + z + z^2 + z^3 + z^4 = 0.
Coordinates are gmpy2 rationals.
"""
from __future__ import annotations

import cmath
from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq

__all__ = ["Cyc", "QQ", "ZETA", "zeta_pow", "to_qq"]

QQ = mpq


def to_qq(x) -> mpq:
    """Coerce an int, Fraction, mpq or "p/q" string to an exact rational."""
    if isinstance(x, str):
        return mpq(x)
    if isinstance(x, (int, Rational)) or type(x).__name__ == "mpq":
        return mpq(x)
    raise TypeError(f"cannot coerce {x!r} to an exact rational")


def _reduce(c: list) -> tuple:
    """Fold a coefficient list in powers of z (any length) to the 4-coordinate basis."""
    out = [mpq(0)] * 5
    for i, v in enumerate(c):
        if v:
            out[i % 5] += v
    c4 = out[4]
    if c4:
        return (out[0] - c4, out[1] - c4, out[2] - c4, out[3] - c4)
    return (out[0], out[1], out[2], out[3])


class Cyc:
    """An element c0 + c1 z + c2 z^2 + c3 z^3 of Q(zeta_5)."""

    __slots__ = ("c",)

    def __init__(self, *coords):
        if len(coords) == 1 and isinstance(coords[0], (tuple, list)):
            coords = tuple(coords[0])
        if len(coords) > 4:
            self.c = _reduce([to_qq(v) for v in coords])
        else:
            c = [to_qq(v) for v in coords] + [mpq(0)] * (4 - len(coords))
            self.c = tuple(c)

    @classmethod
    def _raw(cls, coords: tuple) -> "Cyc":
        obj = object.__new__(cls)
        obj.c = coords
        return obj

    @classmethod
    def coerce(cls, x) -> "Cyc":
        if isinstance(x, Cyc):
            return x
        return cls._raw((to_qq(x), mpq(0), mpq(0), mpq(0)))

    # -- predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.c)

    def is_rational(self) -> bool:
        return not (self.c[1] or self.c[2] or self.c[3])

    def rational(self) -> mpq:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.c[0]

    def __bool__(self):
        return not self.is_zero()

    # -- ring structure -----------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Cyc):
            try:
                q = to_qq(other)
            except TypeError:
                return NotImplemented
            a = self.c
            return Cyc._raw((a[0] + q, a[1], a[2], a[3]))
        a, b = self.c, other.c
        return Cyc._raw((a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]))

    __radd__ = __add__

    def __neg__(self):
        a = self.c
        return Cyc._raw((-a[0], -a[1], -a[2], -a[3]))

    def __sub__(self, other):
        return self + (-Cyc.coerce(other)) if not isinstance(other, Cyc) else self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Cyc):
            try:
                q = to_qq(other)
            except TypeError:
                return NotImplemented
            a = self.c
            return Cyc._raw((a[0] * q, a[1] * q, a[2] * q, a[3] * q))
        a, b = self.c, other.c
        # schoolbook product in Q[z], degree <= 6, then fold
        p = [mpq(0)] * 7
        for i in range(4):
            ai = a[i]
            if ai:
                for j in range(4):
                    if b[j]:
                        p[i + j] += ai * b[j]
        return Cyc._raw(_reduce(p))

    __rmul__ = __mul__

    def inv(self) -> "Cyc":
        """Multiplicative inverse, via the norm: a^-1 = (product of conjugates) / N(a)."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta_5)")
        conj = [self.galois(k) for k in (2, 3, 4)]
        num = conj[0] * conj[1] * conj[2]
        norm = self * num
        return num * (1 / norm.rational())

    def __truediv__(self, other):
        if not isinstance(other, Cyc):
            q = to_qq(other)
            if not q:
                raise ZeroDivisionError("division by zero")
            return self * (1 / q)
        return self * other.inv()

    def __rtruediv__(self, other):
        return Cyc.coerce(other) * self.inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def galois(self, k: int) -> "Cyc":
        """Apply the automorphism z -> z^k (k coprime to 5)."""
        if k % 5 == 0:
            raise ValueError("z -> z^k is an automorphism only for k coprime to 5")
        p = [mpq(0)] * 5
        for i, v in enumerate(self.c):
            p[(i * k) % 5] += v
        return Cyc._raw(_reduce(p))

    def conjugate(self) -> "Cyc":
        return self.galois(4)

    # -- comparison / hashing -----------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Cyc):
            return self.c == other.c
        try:
            q = to_qq(other)
        except TypeError:
            return NotImplemented
        return self.c == (q, 0, 0, 0)

    def __hash__(self):
        if self.is_rational():
            return hash(self.c[0])
        return hash(self.c)

    # -- conversion ---------------------------------------------------------
    def to_complex(self) -> complex:
        z = cmath.exp(2j * cmath.pi / 5)
        return sum(float(v) * z**i for i, v in enumerate(self.c))

    def to_json(self) -> list:
        return [str(v) for v in self.c]

    @classmethod
    def from_json(cls, data) -> "Cyc":
        return cls(*[mpq(s) for s in data])

    def __repr__(self):
        return f"Cyc({', '.join(repr(str(v)) for v in self.c)})"

    def __str__(self):
        terms = []
        for i, v in enumerate(self.c):
            if not v:
                continue
            mono = ["", "z", "z^2", "z^3"][i]
            if not mono:
                terms.append(str(v))
            elif v == 1:
                terms.append(mono)
            elif v == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{v}*{mono}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


ZERO = Cyc._raw((mpq(0),) * 4)
ONE = Cyc._raw((mpq(1), mpq(0), mpq(0), mpq(0)))
ZETA = Cyc._raw((mpq(0), mpq(1), mpq(0), mpq(0)))

_POWERS = tuple(Cyc([0] * i + [1]) for i in range(5))


def zeta_pow(n: int) -> Cyc:
    """Return z^(n mod 5) in canonical coordinates."""
    return _POWERS[n % 5]


def as_fraction(q) -> Fraction:
    q = mpq(q)
    return Fraction(int(q.numerator), int(q.denominator))

"""Truncated formal power series in x with exact coefficients.

A :class:`Series` stores ``x^val * (c_0 + c_1 x + ...)`` together with an
absolute precision ``order``: every coefficient of ``x^k`` with ``k <= order``
is exact, nothing beyond is known.  Arithmetic propagates precision the usual
way, so dividing by a series with a zero at the origin (for example ``L``)
honestly loses one order instead of fabricating garbage coefficients.

Coefficients may be any exact field elements supporting ``+``, ``*``, ``-``,
truth testing and division by integers (gmpy2 rationals or :class:`Cyc`).
"""
from __future__ import annotations

from gmpy2 import mpq

from .cyclo import to_qq

__all__ = ["Series", "PrecisionError", "x_series", "const", "monomial"]


class PrecisionError(ArithmeticError):
    """Raised when a requested truncation exceeds what the inputs determine."""


def _is_zero(c) -> bool:
    return not c


class Series:
    """An element of k((x)) known modulo x^(order+1)."""

    __slots__ = ("val", "coeffs", "order")

    def __init__(self, coeffs, order: int | None = None, val: int = 0):
        coeffs = list(coeffs)
        if order is None:
            order = val + len(coeffs) - 1
        n = order - val + 1
        if n < 0:
            coeffs = []
        elif len(coeffs) < n:
            coeffs.extend([mpq(0)] * (n - len(coeffs)))
        else:
            del coeffs[n:]
        # strip leading zeros so that val is the true valuation
        i = 0
        while i < len(coeffs) and _is_zero(coeffs[i]):
            i += 1
        if i:
            coeffs = coeffs[i:]
            val += i
        if not coeffs:
            val = order + 1
        self.val = val
        self.coeffs = tuple(coeffs)
        self.order = order

    # -- access -------------------------------------------------------------
    def __getitem__(self, k: int):
        """Coefficient of x^k; raises if x^k lies beyond the known precision."""
        if k > self.order:
            raise PrecisionError(f"coefficient x^{k} requested, series known through x^{self.order}")
        i = k - self.val
        if i < 0:
            return mpq(0)
        return self.coeffs[i]

    def is_zero(self) -> bool:
        return not self.coeffs

    def dense(self, upto: int | None = None) -> list:
        """Coefficients of x^0..x^upto as a list (requires nonnegative valuation)."""
        upto = self.order if upto is None else upto
        if self.coeffs and self.val < 0:
            raise ValueError("dense() needs a series without negative powers")
        return [self[k] for k in range(upto + 1)]

    def truncate(self, order: int) -> "Series":
        if order > self.order:
            raise PrecisionError(f"cannot raise precision from {self.order} to {order}")
        return Series(self.coeffs, order, self.val)

    def map(self, fn) -> "Series":
        return Series([fn(c) for c in self.coeffs], self.order, self.val)

    # -- ring operations ----------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Series):
            return other
        return const(other, self.order)

    def __add__(self, other):
        if not isinstance(other, Series):
            if _is_zero(other):
                return self
            other = const(other, self.order)
        order = min(self.order, other.order)
        if self.is_zero() or self.val > order:
            return other.truncate(order) if other.order != order else other
        if other.is_zero() or other.val > order:
            return self.truncate(order) if self.order != order else self
        val = min(self.val, other.val)
        out = [mpq(0)] * (order - val + 1)
        for src in (self, other):
            off = src.val - val
            for i, c in enumerate(src.coeffs[: order - src.val + 1]):
                out[off + i] = out[off + i] + c
        return Series(out, order, val)

    __radd__ = __add__

    def __neg__(self):
        return Series([-c for c in self.coeffs], self.order, self.val)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Series):
            return Series([c * other for c in self.coeffs], self.order, self.val)
        rel = min(self.order - self.val, other.order - other.val)
        val = self.val + other.val
        order = val + rel
        if rel < 0:
            return Series([], order)
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(rel + 1):
            acc = mpq(0)
            for i in range(max(0, k - len(b) + 1), min(k, len(a) - 1) + 1):
                acc = acc + a[i] * b[k - i]
            out.append(acc)
        return Series(out, order, val)

    def __rmul__(self, other):
        return self * other

    def shift(self, m: int) -> "Series":
        """Multiply by x^m (m may be negative); precision moves with it."""
        return Series(self.coeffs, self.order + m, self.val + m)

    def mul_inv(self) -> "Series":
        """Multiplicative inverse; the leading coefficient must be invertible."""
        if self.is_zero():
            raise ZeroDivisionError("series inverse: series is zero to known precision")
        a = self.coeffs
        rel = self.order - self.val
        inv0 = mpq(1) / a[0]
        out = [inv0]
        for k in range(1, rel + 1):
            acc = mpq(0)
            for i in range(1, min(k, len(a) - 1) + 1):
                acc = acc + a[i] * out[k - i]
            out.append(-acc * inv0)
        return Series(out, -self.val + rel, -self.val)

    def __truediv__(self, other):
        if isinstance(other, Series):
            return self * other.mul_inv()
        return self * (mpq(1) / other)

    def __rtruediv__(self, other):
        return self.mul_inv() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.mul_inv() ** (-n)
        if n == 0:
            return const(1, self.order - self.val)
        result = None
        base = self
        while True:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if not n:
                return result
            base = base * base

    # -- calculus -----------------------------------------------------------
    def d_op(self) -> "Series":
        """The derivation D = x d/dx."""
        return Series([(self.val + i) * c for i, c in enumerate(self.coeffs)], self.order, self.val)

    def compose(self, g: "Series") -> "Series":
        """Return self(g) for g with positive valuation (Horner scheme)."""
        if self.val < 0:
            raise ValueError("compose requires a power series on the outside")
        if g.is_zero() or g.val < 1:
            raise ValueError("inner series must have positive valuation")
        # unknown terms of self start at x^(order+1), i.e. at g^(order+1)
        order = min((self.order + 1) * g.val - 1, g.order)
        acc = const(mpq(0), order)
        for k in range(self.order, -1, -1):
            acc = acc * g + self[k]
            acc = acc.truncate(order) if acc.order > order else acc
        return acc

    def revert(self) -> "Series":
        """Compositional inverse: f(revert(f)) = x + O(x^(order+1))."""
        if self.val != 1:
            raise ValueError("revert requires f(0) = 0 and f'(0) != 0")
        n = self.order
        # Lagrange inversion: [x^k] g = (1/k) [x^(k-1)] (x/f)^k
        phi = self.shift(-1).mul_inv()
        g = [mpq(0)]
        power = phi
        for k in range(1, n + 1):
            g.append(power[k - 1] * mpq(1, k))
            power = power * phi
        return Series(g, n)

    def frac_pow(self, p) -> "Series":
        """Binomial series f^p for f with constant term 1 and rational p."""
        p = to_qq(p)
        if self.val != 0 or self.coeffs[0] != 1:
            raise ValueError("frac_pow requires constant term 1")
        # J.C.P. Miller recurrence: f * (f^p)' = p f' f^p, in coefficient form
        a = self.coeffs
        n = self.order
        out = [mpq(1)]
        for k in range(1, n + 1):
            acc = mpq(0)
            for i in range(1, min(k, len(a) - 1) + 1):
                acc = acc + (p * i - (k - i)) * a[i] * out[k - i]
            out.append(acc / k)
        return Series(out, n)

    # -- comparison / output ------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Series):
            other = const(other, self.order)
        order = min(self.order, other.order)
        for k in range(min(self.val, other.val), order + 1):
            if self[k] != other[k]:
                return False
        return True

    __hash__ = None

    def residual_zero(self) -> bool:
        return self.is_zero()

    def to_json(self) -> dict:
        def enc(c):
            return c.to_json() if hasattr(c, "to_json") else str(c)

        return {"order": self.order, "val": self.val, "coeffs": [enc(c) for c in self.coeffs]}

    def __repr__(self):
        terms = [f"({c})*x^{self.val + i}" for i, c in enumerate(self.coeffs[:6]) if not _is_zero(c)]
        return f"Series({' + '.join(terms) or '0'} + O(x^{self.order + 1}))"


def const(c, order: int) -> Series:
    return Series([c if not isinstance(c, int) else mpq(c)], order)


def monomial(c, k: int, order: int) -> Series:
    return Series([c], order, k)


def x_series(order: int) -> Series:
    return monomial(mpq(1), 1, order)

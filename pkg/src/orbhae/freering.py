"""The differential ring housing R-matrix entries and potentials.

Elements are polynomials in the free generators A1, DA1, D2A1, A2 with
Laurent-polynomial coefficients in L, extended by C1^(+-1) and C2^(+-1).
C3 is never stored: it is rewritten as L^5 C1^-2 C2^-2 on construction.

A monomial is packed into one integer (16 bits per exponent, biased so that
negative exponents are allowed); multiplying monomials is integer addition.
"""
from __future__ import annotations

from gmpy2 import mpq

from .cyclo import Cyc, to_qq
from .series import PrecisionError, Series

__all__ = [
    "GENS",
    "Elem",
    "L",
    "A1",
    "DA1",
    "D2A1",
    "A2",
    "C1",
    "C2",
    "C3",
    "ONE",
    "ZERO",
    "const",
    "d_derive",
    "partial",
    "partial_A2",
    "partial_D2A1",
    "evaluate_to_series",
    "derive_d3a1_rule",
    "derive_da2_rule",
    "is_laurent",
    "is_free",
]

GENS = ("L", "A1", "DA1", "D2A1", "A2", "C1", "C2")
_IDX = {g: i for i, g in enumerate(GENS)}
_BITS = 16
_BIAS = 1 << (_BITS - 1)
_MASK = (1 << _BITS) - 1
_OFF = sum(_BIAS << (_BITS * i) for i in range(len(GENS)))
_UNIT = [1 << (_BITS * i) for i in range(len(GENS))]


def pack(exps) -> int:
    key = _OFF
    for i, e in enumerate(exps):
        if e:
            key += e * _UNIT[i]
    return key


def unpack(key: int) -> tuple:
    return tuple(((key >> (_BITS * i)) & _MASK) - _BIAS for i in range(len(GENS)))


def _exp(key: int, i: int) -> int:
    return ((key >> (_BITS * i)) & _MASK) - _BIAS


def _coerce_coeff(c):
    if isinstance(c, Cyc):
        return c.rational() if c.is_rational() else c
    return to_qq(c)


class Elem:
    """A finite sum of coefficient * monomial; immutable by convention."""

    __slots__ = ("t",)

    def __init__(self, terms=None):
        self.t = {k: c for k, c in (terms or {}).items() if c}

    @classmethod
    def _raw(cls, t: dict) -> "Elem":
        obj = object.__new__(cls)
        obj.t = t
        return obj

    @classmethod
    def monomial(cls, coeff=1, **exps) -> "Elem":
        e = [0] * len(GENS)
        for g, v in exps.items():
            e[_IDX[g]] = v
        c = _coerce_coeff(coeff)
        return cls._raw({pack(e): c} if c else {})

    @classmethod
    def coerce(cls, x) -> "Elem":
        if isinstance(x, Elem):
            return x
        c = _coerce_coeff(x)
        return cls._raw({_OFF: c} if c else {})

    # -- structure ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.t

    def __bool__(self):
        return bool(self.t)

    def __len__(self):
        return len(self.t)

    def terms(self):
        """Yield (exponent tuple, coefficient) in normal-form order."""
        for key in sorted(self.t, key=_sort_key):
            yield unpack(key), self.t[key]

    def exponent_range(self, gen: str) -> tuple:
        i = _IDX[gen]
        es = [_exp(k, i) for k in self.t]
        return (min(es), max(es)) if es else (0, 0)

    def degree(self, gen: str) -> int:
        return self.exponent_range(gen)[1]

    def coefficient_field(self) -> str:
        exotic = any(isinstance(c, Cyc) and not c.is_rational() for c in self.t.values())
        return "Q(zeta5)" if exotic else "Q"

    # -- arithmetic -------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Elem):
            other = Elem.coerce(other)
        if len(self.t) < len(other.t):
            small, big = self.t, other.t
        else:
            small, big = other.t, self.t
        out = dict(big)
        for k, c in small.items():
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v = v + c
                if v:
                    out[k] = v
                else:
                    del out[k]
        return Elem._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Elem._raw({k: -c for k, c in self.t.items()})

    def __sub__(self, other):
        if not isinstance(other, Elem):
            other = Elem.coerce(other)
        return self + (-other)

    def __rsub__(self, other):
        return Elem.coerce(other) - self

    def scale(self, c) -> "Elem":
        c = _coerce_coeff(c)
        if not c:
            return ZERO
        return Elem._raw({k: v * c for k, v in self.t.items() if v * c})

    def __mul__(self, other):
        if not isinstance(other, Elem):
            return self.scale(other)
        out: dict = {}
        get = out.get
        a, b = self.t, other.t
        if len(a) < len(b):
            a, b = b, a
        for kb, cb in b.items():
            shift = kb - _OFF
            for ka, ca in a.items():
                k = ka + shift
                out[k] = get(k, 0) + ca * cb
        return Elem._raw({k: c for k, c in out.items() if c})

    def __rmul__(self, other):
        return self.scale(other)

    def mul_monomial(self, coeff=1, **exps) -> "Elem":
        shift = pack([exps.get(g, 0) for g in GENS]) - _OFF
        c = _coerce_coeff(coeff)
        return Elem._raw({k + shift: v * c for k, v in self.t.items()})

    def __truediv__(self, other):
        if isinstance(other, Elem):
            if len(other.t) != 1:
                raise ZeroDivisionError("only division by a monomial is supported")
            (k, c), = other.t.items()
            exps = unpack(k)
            return self.mul_monomial(1 / c, **{g: -e for g, e in zip(GENS, exps)})
        return self.scale(mpq(1) / other)

    def __pow__(self, n: int):
        if n < 0:
            return ONE / (self ** (-n))
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, Elem):
            try:
                other = Elem.coerce(other)
            except TypeError:
                return NotImplemented
        return self.t == other.t

    __hash__ = None

    # -- output -----------------------------------------------------------------
    def to_json(self) -> list:
        out = []
        for exps, c in self.terms():
            mono = {g: e for g, e in zip(GENS, exps) if e}
            out.append({"monomial": mono, "coeff": c.to_json() if isinstance(c, Cyc) else str(c)})
        return out

    @classmethod
    def from_json(cls, data) -> "Elem":
        t = {}
        for item in data:
            c = item["coeff"]
            c = Cyc.from_json(c) if isinstance(c, list) else mpq(c)
            t[pack([item["monomial"].get(g, 0) for g in GENS])] = c
        return cls(t)

    def __str__(self):
        if not self.t:
            return "0"
        parts = []
        for exps, c in self.terms():
            factors = []
            for g, e in zip(GENS, exps):
                if e == 1:
                    factors.append(g)
                elif e:
                    factors.append(f"{g}^{e}")
            cs = str(c)
            if isinstance(c, Cyc):
                cs = f"({cs})"
            if not factors:
                parts.append(cs)
            elif c == 1:
                parts.append("*".join(factors))
            elif c == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(cs + "*" + "*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


def _sort_key(key: int):
    e = unpack(key)
    # (C1, C2, A-multidegree, L)
    return (e[5], e[6], e[1], e[2], e[3], e[4], e[0])


ZERO = Elem._raw({})
ONE = Elem._raw({_OFF: mpq(1)})
L = Elem.monomial(L=1)
A1 = Elem.monomial(A1=1)
DA1 = Elem.monomial(DA1=1)
D2A1 = Elem.monomial(D2A1=1)
A2 = Elem.monomial(A2=1)
C1 = Elem.monomial(C1=1)
C2 = Elem.monomial(C2=1)
C3 = Elem.monomial(L=5, C1=-2, C2=-2)


def const(c) -> Elem:
    return Elem.coerce(c)


def is_laurent(f: Elem) -> bool:
    """True when f lies in Q(zeta5)[L, 1/L]."""
    return all(not any(unpack(k)[1:]) for k in f.t)


def is_free(f: Elem) -> bool:
    """True when f lies in F, i.e. has no C1 or C2 factors."""
    return all(_exp(k, 5) == 0 and _exp(k, 6) == 0 for k in f.t)


# -- derivation ------------------------------------------------------------------

_S = ONE - L**5 * mpq(1, 5**5)  # DL / L
_X1 = _S - L * A1  # DC1 / C1
_X2 = _S + L * A1 - L * A2  # DC2 / C2


def partial(f: Elem, gen: str) -> Elem:
    """Formal partial derivative with respect to one generator."""
    i = _IDX[gen]
    unit = _UNIT[i]
    out = {}
    for k, c in f.t.items():
        e = _exp(k, i)
        if e:
            out[k - unit] = c * e
    return Elem._raw(out)


def partial_A2(f: Elem) -> Elem:
    return partial(f, "A2")


def partial_D2A1(f: Elem) -> Elem:
    return partial(f, "D2A1")


def _euler(f: Elem, gen: str) -> Elem:
    """gen * df/dgen, which is what a logarithmic derivative multiplies."""
    i = _IDX[gen]
    out = {}
    for k, c in f.t.items():
        e = _exp(k, i)
        if e:
            out[k] = c * e
    return Elem._raw(out)


def derive_da2_rule() -> Elem:
    """Solve the DX2 relation for D(A2) using the linear change X2 = s + L A1 - L A2."""
    s, X1, X2 = _S, _X1, _X2
    DX1 = d_derive(X1, {"D2A1": ZERO, "A2": ZERO})
    rhs = (s * -10 + (s * X1).scale(10) + (s * X2).scale(5) - (X1 * X1).scale(2)
           - DX1.scale(4) - (X1 * X2).scale(2) - X2 * X2)
    # D(X2) = D(s) + D(L A1) - L D(A2) - A2 D(L): isolate the unknown D(A2)
    known = d_derive(X2, {"D2A1": ZERO, "A2": ZERO})
    return (known - rhs) / L


def derive_d3a1_rule() -> Elem:
    """Solve the B4 relation for D(D2A1).

    With X1 = s - L A1, the relation 5^4 B4 = s (...) contains D^3 A1 only
    through D^3 X1, with coefficient -L.  Evaluating everything with
    D(D2A1) := 0 therefore leaves E0 = -L * D^3 A1 on the nose.
    """
    probe = {"D2A1": ZERO}
    B = {}
    cur = _X1
    for i in range(1, 5):
        B[i] = cur.scale(mpq(1, 5**i))
        if i < 4:
            cur = d_derive(cur, probe) + _X1 * cur
    e0 = B[4] - _S * (B[3].scale(2) - B[2].scale(mpq(7, 5)) + B[1].scale(mpq(2, 5)) - mpq(24, 625))
    return (e0 * mpq(5**4)) / L


# D(A2) expressed in F
DA2_RULE = L * A1 * A1 + L * A2 * A2 - DA1.scale(3) - (_S * L**4).scale(mpq(15, 5**5))

_RULES: dict = {"A2": DA2_RULE}


def _d3a1_rule() -> Elem:
    rule = _RULES.get("D2A1")
    if rule is None:
        from .rules_data import D3A1_RULE_TERMS

        rule = Elem.from_json(D3A1_RULE_TERMS)
        _RULES["D2A1"] = rule
    return rule


def d_derive(f: Elem, override: dict | None = None) -> Elem:
    """Apply D = x d/dx using the rewrite rules for the generators.

    ``override`` replaces the image of D(A2) or D(D2A1); it exists so that
    the rules themselves can be re-derived from the defining relations.
    """
    rules = override or {}
    da2 = rules.get("A2", DA2_RULE)
    d3a1 = rules.get("D2A1")
    if d3a1 is None:
        d3a1 = _d3a1_rule()
    out = ZERO
    for gen, logd in (("L", _S), ("C1", _X1), ("C2", _X2)):
        eu = _euler(f, gen)
        if eu:
            out = out + eu * logd
    for gen, image in (("A1", DA1), ("DA1", D2A1), ("D2A1", d3a1), ("A2", da2)):
        p = partial(f, gen)
        if p and image:
            out = out + p * image
    return out


# -- evaluation -------------------------------------------------------------------


class _PowerCache:
    def __init__(self, base: Series):
        self.base = base
        self.pos = {0: None, 1: base}
        self.neg = {}

    def get(self, e: int) -> Series:
        if e > 0:
            if e not in self.pos:
                self.pos[e] = self.get(e - 1) * self.base
            return self.pos[e]
        if e < 0:
            if e not in self.neg:
                if e == -1:
                    self.neg[e] = self.base.mul_inv()
                else:
                    self.neg[e] = self.get(e + 1) * self.get(-1)
            return self.neg[e]
        raise ValueError("power 0 handled by caller")


class Evaluator:
    """Substitutes mirror series into ring elements, caching generator powers."""

    def __init__(self, m):
        self.m = m
        series = {"L": m.L, "A1": m.A1, "DA1": m.DA1, "D2A1": m.D2A1, "A2": m.A2,
                  "C1": m.C1, "C2": m.C2}
        self.caches = [_PowerCache(series[g]) for g in GENS]
        self.order = m.work_order

    def __call__(self, f: Elem, need: int | None = None) -> Series:
        groups: dict = {}
        for k, c in f.t.items():
            e = unpack(k)
            groups.setdefault(e[1:], []).append((e[0], c))
        total = Series([], self.order)
        lcache = self.caches[0]
        for rest, lterms in groups.items():
            lpart = None
            for e, c in lterms:
                term = lcache.get(e) * c if e else Series([c], self.order)
                lpart = term if lpart is None else lpart + term
            prod = lpart
            for i, e in enumerate(rest, start=1):
                if e:
                    prod = prod * self.caches[i].get(e)
            total = total + prod
        if need is not None and total.order < need:
            raise PrecisionError(
                f"evaluation only determined through x^{total.order}, need x^{need}; "
                "increase the guard band")
        return total


def evaluate_to_series(f: Elem, m, need: int | None = None) -> Series:
    """Evaluate f on the mirror series of ``m`` (default target: through x^m.N)."""
    ev = getattr(m, "_evaluator", None)
    if ev is None:
        ev = Evaluator(m)
        object.__setattr__(m, "_evaluator", ev)
    return ev(f, m.N if need is None else need)

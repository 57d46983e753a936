"""Witten-Kontsevich intersection numbers <tau_a1 ... tau_an>_g.

Evaluated by the DVV (Virasoro) recursion, short-circuited by the string and
dilaton equations whenever a tau_0 or tau_1 is present.  Results are memoized
in-process and optionally persisted through :mod:`orbhae.cache`.
"""
from __future__ import annotations

from itertools import combinations

from gmpy2 import mpq

from . import cache

__all__ = ["psi_integral", "PsiKey", "clear_memo", "save_memo", "load_memo", "UnstableError"]


class UnstableError(ValueError):
    """Raised for (g, n) with 2g - 2 + n <= 0."""


def _dfact(n: int) -> int:
    """Double factorial with (-1)!! = 1."""
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def PsiKey(g: int, exps) -> tuple:
    return (g, tuple(sorted(exps)))


_memo: dict = {}


def clear_memo() -> None:
    _memo.clear()


def _value(g: int, exps: tuple) -> mpq:
    """Value for a sorted key; unstable brackets evaluate to 0 here."""
    n = len(exps)
    if g < 0 or 2 * g - 2 + n <= 0:
        return mpq(0)
    if sum(exps) != 3 * g - 3 + n:
        return mpq(0)
    key = (g, exps)
    hit = _memo.get(key)
    if hit is not None:
        return hit
    if g == 0 and n == 3:
        out = mpq(1)
    elif g == 1 and n == 1:
        out = mpq(1, 24)
    elif exps[0] == 0:
        # string equation
        rest = exps[1:]
        out = mpq(0)
        for j, a in enumerate(rest):
            if a:
                out += _value(g, tuple(sorted(rest[:j] + (a - 1,) + rest[j + 1:])))
    elif exps[0] == 1:
        # dilaton equation
        rest = exps[1:]
        out = (2 * g - 2 + len(rest)) * _value(g, rest)
    else:
        out = _dvv(g, exps)
    _memo[key] = out
    return out


def _dvv(g: int, exps: tuple) -> mpq:
    k = exps[-1] - 1
    rest = exps[:-1]
    total = mpq(0)
    for j, d in enumerate(rest):
        others = rest[:j] + rest[j + 1:]
        coef = mpq(_dfact(2 * k + 2 * d + 1), _dfact(2 * d - 1))
        total += coef * _value(g, tuple(sorted(others + (d + k,))))
    half = mpq(1, 2)
    n = len(rest)
    for r in range(k):
        s = k - 1 - r
        w = _dfact(2 * r + 1) * _dfact(2 * s + 1)
        total += half * w * _value(g - 1, tuple(sorted(rest + (r, s))))
        idx = range(n)
        for size in range(n + 1):
            for I in combinations(idx, size):
                left = tuple(rest[i] for i in I)
                right = tuple(rest[i] for i in idx if i not in I)
                for g1 in range(g + 1):
                    a = _value(g1, tuple(sorted(left + (r,))))
                    if a:
                        total += half * w * a * _value(g - g1, tuple(sorted(right + (s,))))
    return total / _dfact(2 * k + 3)


def psi_integral(g: int, exps) -> mpq:
    """Exact <prod tau_{a_i}>_g; raises UnstableError when 2g - 2 + n <= 0."""
    exps = tuple(sorted(int(a) for a in exps))
    if g < 0 or any(a < 0 for a in exps):
        raise ValueError("genus and exponents must be non-negative")
    if 2 * g - 2 + len(exps) <= 0:
        raise UnstableError(f"unstable moduli space: g={g}, n={len(exps)}")
    return _value(g, exps)


def save_memo(directory) -> None:
    payload = [[g, list(e), str(v)] for (g, e), v in sorted(_memo.items())]
    cache.store(directory, "psi", payload)


def load_memo(directory) -> int:
    payload = cache.load(directory, "psi")
    if not payload:
        return 0
    for g, e, v in payload:
        _memo.setdefault((g, tuple(e)), mpq(v))
    return len(payload)

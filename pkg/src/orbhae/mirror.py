"""Hypergeometric series of the I-function and the identities among them.

Everything is built with a guard band of extra orders so that quotients by
series vanishing at x = 0 (L, C1, C2) still leave ``N`` exact coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

from gmpy2 import mpq

from .series import PrecisionError, Series, const, x_series

__all__ = [
    "MirrorData",
    "build_i_coeffs",
    "mirror_map_closed_form",
    "build_all",
    "check_identities",
    "S5",
    "DEFAULT_GUARD",
    "variant_da2_residual",
]

FIVE5 = mpq(5**5)
DEFAULT_GUARD = 12


def _b_product(k: int) -> list:
    """Coefficients in w = z^5 of prod over 0 <= b < k/5, b = k/5 mod 1, of (1 - b^5 w)."""
    q, r = divmod(k, 5)
    poly = [mpq(1)]
    for j in range(q):
        b5 = (mpq(r, 5) + j) ** 5
        new = poly + [mpq(0)]
        for i, c in enumerate(poly):
            new[i + 1] -= c * b5
        poly = new
    return poly


def build_i_coeffs(N: int) -> dict:
    """Return {m: I_m} where I(x, z) = sum_m I_m(x) z^(-m) phi_m, truncated at x^N."""
    if N < 1:
        raise ValueError("order must be at least 1")
    bins: dict[int, list] = {}
    for k in range(N + 1):
        inv_fact = mpq(1, factorial(k))
        for deg, c in enumerate(_b_product(k)):
            if not c:
                continue
            m = k - 5 * deg
            if m < 0:
                raise AssertionError(f"positive power z^{-m} survived at x^{k}")
            bins.setdefault(m, [mpq(0)] * (N + 1))[k] += c * inv_fact
    return {m: Series(c, N) for m, c in sorted(bins.items())}


def mirror_map_closed_form(N: int) -> Series:
    """T(x) from the Gamma-ratio formula, with Gamma(k+1/5)/Gamma(1/5) as an exact product."""
    coeffs = [mpq(0)] * (N + 1)
    k = 0
    while 5 * k + 1 <= N:
        ratio = mpq(1)
        for b in range(k):
            ratio *= b + mpq(1, 5)
        coeffs[5 * k + 1] = (-1) ** (5 * k) * ratio**5 / factorial(5 * k + 1)
        k += 1
    return Series(coeffs, N)


@dataclass(frozen=True)
class MirrorData:
    """All series derived from the I-function, at working order ``N + guard``."""

    N: int
    guard: int
    I: dict
    T: Series
    L: Series
    C1: Series
    C2: Series
    C3: Series
    X1: Series
    X2: Series
    A1: Series
    A2: Series
    DA1: Series
    D2A1: Series
    B: dict
    K: dict
    s: Series = field(repr=False)

    @property
    def work_order(self) -> int:
        return self.N + self.guard


def S5(L: Series) -> Series:
    """The series 1 - L^5/5^5."""
    return 1 - L**5 * (1 / FIVE5)


def _checked(name: str, build):
    try:
        return build()
    except (ZeroDivisionError, PrecisionError) as exc:
        raise ArithmeticError(f"construction of {name} failed: {exc}") from exc


def build_all(N: int = 40, guard: int = DEFAULT_GUARD) -> MirrorData:
    """Construct every mirror series, keeping ``guard`` extra orders of precision."""
    if N < 10:
        raise ValueError("build_all needs N >= 10")
    W = N + guard
    I = build_i_coeffs(W)
    x = x_series(W)
    D = Series.d_op
    L = _checked("L", lambda: x * (1 + (x**5) * (1 / FIVE5)).frac_pow(mpq(-1, 5)))
    T = I[1]
    C1 = _checked("C1", lambda: D(I[1]))
    C2 = _checked("C2", lambda: D(D(I[2]) / C1))
    C3 = _checked("C3", lambda: D(D(D(I[3]) / C1) / C2))
    s = S5(L)
    X1 = _checked("X1", lambda: D(C1) / C1)
    X2 = _checked("X2", lambda: D(C2) / C2)
    DLL = D(L) / L
    A1 = _checked("A1", lambda: (DLL - X1) / L)
    A2 = _checked("A2", lambda: (2 * DLL - X1 - X2) / L)
    B = {}
    cur = X1
    for i in range(1, 5):
        B[i] = cur * mpq(1, 5**i)
        cur = D(cur) + X1 * cur
    one = const(1, W)
    K = {0: one, 1: C1, 2: C1 * C2, 3: C1 * C2 * C3, 4: C1 * C2 * C2 * C3}
    return MirrorData(
        N=N, guard=guard, I=I, T=T, L=L, C1=C1, C2=C2, C3=C3, X1=X1, X2=X2,
        A1=A1, A2=A2, DA1=D(A1), D2A1=D(D(A1)), B=B, K=K, s=s,
    )


def _residuals(m: MirrorData) -> dict:
    D = Series.d_op
    L, s, X1, X2, A1, A2, B = m.L, m.s, m.X1, m.X2, m.A1, m.A2, m.B
    L5 = L**5 * (1 / FIVE5)
    out = {
        "DL/L": D(L) / L - s,
        "C1^2 C2^2 C3 = L^5": m.C1**2 * m.C2**2 * m.C3 - L**5,
        "B4 relation": B[4] - s * (2 * B[3] - mpq(7, 5) * B[2] + mpq(2, 5) * B[1] - mpq(24, 625)),
        "DX2 relation": D(X2) - (-10 * s + 10 * s * X1 + 5 * s * X2 - 2 * X1**2 - 4 * D(X1)
                                 - 2 * X1 * X2 - X2**2),
        "DA2 rewrite": D(A2) - (L * A1**2 + L * A2**2 - 3 * D(A1) - 15 * s * L5 / L),
        "X1 linear change": X1 - (s - L * A1),
        "X2 linear change": X2 - (s + L * A1 - L * A2),
        "B_1 definition": B[1] - X1 * mpq(1, 5),
    }
    for i in (2, 3, 4):
        out[f"B_{i} definition"] = B[i] - (D(B[i - 1]) + X1 * B[i - 1]) * mpq(1, 5)
    return out


def variant_da2_residual(m: MirrorData) -> Series:
    """Residual of the DA2 rewrite with coefficient -1 on DA1 and an L^5 tail.

    This variant is not a consequence of the DX2 relation; the residual is kept
    as a diagnostic and is expected to be nonzero.
    """
    D = Series.d_op
    L, s, A1, A2 = m.L, m.s, m.A1, m.A2
    return (D(A2) - (L * A1**2 + L * A2**2 - D(A1) - 15 * s * L**5 * (1 / FIVE5))).truncate(m.N)


def check_identities(m: MirrorData) -> dict:
    """Map identity name -> (residual truncated at x^N, residual is zero)."""
    report = {}
    for name, res in _residuals(m).items():
        if res.order < m.N:
            raise PrecisionError(f"{name}: only known through x^{res.order}, need x^{m.N}")
        res = res.truncate(m.N)
        report[name] = (res, res.is_zero())
    return report

"""Frobenius data at the semisimple point and the R-matrix table P~^k_{ij}.

The table is produced twice: once in the ring of :mod:`orbhae.freering`
(row 0 as a Laurent polynomial in L, the other rows from the descending
flatness equations) and once directly on truncated series.  Integration
constants (the L^0 part of row 0) are pinned by the symplectic condition
wherever it pins them; see :func:`build_rtable` for the remaining freedom.
"""
from __future__ import annotations

from gmpy2 import mpq

from . import freering as fr
from .cyclo import Cyc, zeta_pow
from .freering import Elem, d_derive, is_laurent, partial_A2, partial_D2A1
from .series import Series, const

__all__ = [
    "FrobeniusData",
    "K_lift",
    "RTable",
    "build_rtable",
    "solve_d_laurent",
    "symplectic_residual",
    "symplectic_residual_direct",
    "flatness_residuals",
    "derivative_lemmas",
    "row0_is_laurent",
    "r_matrix",
    "DepthError",
    "PolynomialityError",
    "NormalizationError",
    "INV",
]

FIVE5 = mpq(5**5)
INV = (0, 4, 3, 2, 1)


class DepthError(ValueError):
    """An R-matrix level beyond the solved depth was requested."""

    def __init__(self, needed: int, have: int):
        super().__init__(f"R-matrix depth {have} is insufficient; need max-k >= {needed}")
        self.needed = needed
        self.have = have


class PolynomialityError(ArithmeticError):
    """Row 0 failed to stay inside Q(zeta5)[L, 1/L]."""


class NormalizationError(ArithmeticError):
    """The symplectic condition is unsatisfiable, or leaves a free constant in strict mode."""


def K_lift(i: int) -> Elem:
    """K_i in the ring, with C3 = L^5 C1^-2 C2^-2 eliminated."""
    return {
        0: fr.ONE,
        1: fr.C1,
        2: fr.C1 * fr.C2,
        3: fr.C1 * fr.C2 * fr.C3,
        4: fr.C1 * fr.C2 * fr.C2 * fr.C3,
    }[i]


class FrobeniusData:
    """Pairing, transition matrix, DU and the idempotent norm at t = 0."""

    def __init__(self):
        fifth = mpq(1, 5)
        self.G = [[fifth if (i + j) % 5 == 0 else mpq(0) for j in range(5)] for i in range(5)]
        self.G_inv = [[mpq(5) if (i + j) % 5 == 0 else mpq(0) for j in range(5)] for i in range(5)]
        # L^j / K_j as it appears in the displayed matrix
        shown = [fr.ONE, fr.L / fr.C1, fr.L**2 * (fr.C1 * fr.C2) ** -1,
                 fr.C1 * fr.C2 * fr.L**-2, fr.C1 * fr.L**-1]
        self.psi_shown = [[shown[j].scale(zeta_pow(i * j) * fifth) for j in range(5)] for i in range(5)]
        self.Psi = [[(fr.L**j * K_lift(j) ** -1).scale(zeta_pow(i * j) * fifth) for j in range(5)]
                    for i in range(5)]
        self.DU = [fr.L.scale(zeta_pow(a)) for a in range(5)]
        self.delta = mpq(1, 25)

    def psi_inverse(self) -> list:
        """Psi^-1 = G^-1 Psi^T, valid because Psi G^-1 Psi^T = Id."""
        return [[sum((self.G_inv[i][l] * self.Psi[j][l] for l in range(5) if self.G_inv[i][l]), fr.ZERO)
                 for j in range(5)] for i in range(5)]

    def orthonormality_residual(self) -> list:
        out = []
        for a in range(5):
            for b in range(5):
                acc = fr.ZERO
                for j in range(5):
                    for l in range(5):
                        if self.G_inv[j][l]:
                            acc = acc + self.Psi[a][j] * self.Psi[b][l] * self.G_inv[j][l]
                out.append(acc - (1 if a == b else 0))
        return out

    def base_case(self) -> list:
        """P~^0_{ij} = (L^i/K_i) (Psi^-1)_{ij} zeta^{ij}; all entries must be 1."""
        inv = self.psi_inverse()
        table = [[(fr.L**i * K_lift(i) ** -1 * inv[i][j]).scale(zeta_pow(i * j)) for j in range(5)]
                 for i in range(5)]
        for row in table:
            for e in row:
                if e != 1:
                    raise AssertionError("index convention broken: P~^0 is not all ones")
        return table


def solve_d_laurent(rhs: Elem) -> Elem:
    """Solve D f = rhs in Q(zeta5)[L, 1/L] with zero L^0 coefficient.

    D L^m = m L^m - (m/5^5) L^(m+5) is triangular, so coefficients are solved
    upward; a solution exists only if the top terms cancel, which is checked.
    """
    if not is_laurent(rhs):
        raise PolynomialityError(f"right-hand side leaves the Laurent ring: {rhs}")
    if rhs.is_zero():
        return fr.ZERO
    coeffs = {e[0]: c for e, c in rhs.terms()}
    lo, hi = min(coeffs), max(coeffs)
    f = {}
    for m in range(lo, hi - 4):
        if m == 0:
            continue
        prev = f.get(m - 5, 0)
        val = (coeffs.get(m, 0) + mpq(m - 5) / FIVE5 * prev) / m
        if val:
            f[m] = val
    sol = Elem({fr.pack((m, 0, 0, 0, 0, 0, 0)): c for m, c in f.items()})
    if d_derive(sol) != rhs:
        raise PolynomialityError("D f = rhs has no Laurent-polynomial solution")
    return sol


def _q_terms(prev, j, D, inv_L, A1, A2):
    """Q_4..Q_1 with P~^k_i = P~^k_0 + Q_i, from the level-(k-1) column j."""
    p0, p4, p3, p2 = prev[0][j], prev[4][j], prev[3][j], prev[2][j]
    q4 = D(p0) * inv_L
    q3 = q4 + D(p4) * inv_L + A1 * p4
    q2 = q3 + D(p3) * inv_L + A2 * p3
    q1 = q2 + D(p2) * inv_L - A2 * p2
    return q4, q3, q2, q1


def _row0_rhs(q, D, L, A1, A2):
    q4, q3, q2, q1 = q
    return (D(q4 + q3 + q2 + q1) + L * A1 * (q4 - q1) + L * A2 * (q3 - q2)) * mpq(-1, 5)


def _pair_products(level, k, j, i, ip):
    acc = None
    for a in range(k + 1):
        term = level[a][i][j] * level[k - a][ip][j]
        if (k - a) % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def symplectic_matrix(levels, k: int, zero):
    """M_k = sum_{a+b=k} (-1)^b R_a R_b^T in the normalized idempotent frame.

    Uses R_a[al][j] = (1/5) sum_i zeta^(al*i - (a+i) j) P~^a_{ij}; the j-sum of
    the zeta phases is done exactly, so only rational products are formed.
    """
    cols = [tuple(id(levels[a][i][j]) for a in range(k + 1) for i in range(5)) for j in range(5)]
    uniform = all(c == cols[0] for c in cols)
    M = [[zero for _ in range(5)] for _ in range(5)]
    for i in range(5):
        for ip in range(5):
            if uniform:
                if (k + i + ip) % 5:
                    continue
                weight = {0: mpq(5)}
                prods = {0: _pair_products(levels, k, 0, i, ip)}
            else:
                prods = {j: _pair_products(levels, k, j, i, ip) for j in range(5)}
                weight = {j: zeta_pow(-j * (k + i + ip)) for j in range(5)}
            for al in range(5):
                for be in range(5):
                    ph = zeta_pow(i * al + ip * be) * mpq(1, 25)
                    for j, t in prods.items():
                        M[al][be] = M[al][be] + t * (ph * weight[j])
    return M


def r_matrix(levels, a: int, zero):
    """R_a as a 5x5 matrix (used by the direct oracle)."""
    return [[sum((levels[a][i][j] * (zeta_pow(al * i - (a + i) * j) * mpq(1, 5)) for i in range(5)), zero)
             for j in range(5)] for al in range(5)]


def symplectic_residual_direct(levels, k: int, zero):
    """Same residual via explicit matrix products; slow, kept as an oracle."""
    Rs = [r_matrix(levels, a, zero) for a in range(k + 1)]
    M = [[zero for _ in range(5)] for _ in range(5)]
    for a in range(k + 1):
        b = k - a
        sign = -1 if b % 2 else 1
        for al in range(5):
            for be in range(5):
                acc = zero
                for j in range(5):
                    acc = acc + Rs[a][al][j] * Rs[b][be][j]
                M[al][be] = M[al][be] + acc * sign
    return M


def _is_zero(x) -> bool:
    return x.is_zero()


def _const_value(x, kind: str):
    """Return the scalar if x is a constant, else None."""
    if kind == "sym":
        if x.is_zero():
            return mpq(0)
        if len(x.t) == 1 and fr._OFF in x.t:
            return x.t[fr._OFF]
        return None
    if x.val < 0:
        return None
    c0 = x[0]
    rest = x - const(c0, x.order)
    return c0 if rest.is_zero() else None


class RTable:
    """P~^k_{ij} for 0 <= k <= K_max, symbolic and (optionally) as series."""

    def __init__(self, K_max, sym, ser, constants, mirror, policy):
        self.K_max = K_max
        self.sym = sym
        self.ser = ser
        self.constants = constants
        self.mirror = mirror
        self.policy = policy

    def require(self, level: int) -> None:
        if level > self.K_max:
            raise DepthError(level, self.K_max)

    def P(self, k: int, i: int, j: int, kind: str = "sym"):
        if k < 0:
            return None
        self.require(k)
        return (self.sym if kind == "sym" else self.ser)[k][i][j]

    def column_uniform(self) -> bool:
        """True when P~^k_{ij} does not depend on j (all constants j-independent)."""
        return all(self.sym[k][i][j] == self.sym[k][i][0] for k in range(self.K_max + 1)
                   for i in range(5) for j in range(5))

    def row0(self, k: int, j: int = 0) -> Elem:
        return self.sym[k][0][j]

    def degree_report(self) -> list:
        out = []
        for k in range(self.K_max + 1):
            deg = 0
            for i in range(5):
                for exps, _ in self.sym[k][i][0].terms():
                    deg = max(deg, sum(exps[1:5]))
            out.append(deg)
        return out


def _resolve_odd(policy, k: int, j: int):
    if policy == "strict":
        raise NormalizationError(
            f"level {k}: the symplectic condition does not fix the integration constant; "
            "pass explicit odd-level constants")
    if isinstance(policy, dict):
        v = policy.get((k, j), policy.get(k, 0))
    else:
        v = policy
    return v if isinstance(v, Cyc) else mpq(v)


def _solve_constants(levels, k, kind, zero, policy):
    M = symplectic_matrix(levels, k, zero)
    consts = []
    for j in range(5):
        for be in range(5):
            if be != j and not M[j][be].is_zero():
                raise NormalizationError(f"level {k}: off-diagonal symplectic residual ({j},{be}) is nonzero")
        if k % 2:
            if not M[j][j].is_zero():
                raise NormalizationError(f"level {k}: symplectic residual cannot be cancelled")
            consts.append(_resolve_odd(policy, k, j))
        else:
            v = _const_value(M[j][j], kind)
            if v is None:
                raise NormalizationError(f"level {k}: diagonal residual ({j},{j}) is not constant")
            c = v * zeta_pow(j * k) * mpq(-1, 2)
            if isinstance(c, Cyc) and c.is_rational():
                c = c.rational()
            consts.append(c)
    return consts


def _add_const(col_rows, c, kind, order=None):
    if not c:
        return col_rows
    if kind == "sym":
        return [r + c for r in col_rows]
    return [r + const(c, r.order) for r in col_rows]


def _build(K_max, kind, mirror, policy, fixed_constants=None):
    """Run the recursion in one representation; returns (levels, constants)."""
    if kind == "sym":
        D = d_derive
        L, A1, A2 = fr.L, fr.A1, fr.A2
        inv_L = fr.L**-1
        one, zero = fr.ONE, fr.ZERO

        def integrate(rhs):
            return solve_d_laurent(rhs)
    else:
        m = mirror
        D = Series.d_op
        L, A1, A2 = m.L, m.A1, m.A2
        inv_L = m.L.mul_inv()
        one, zero = const(1, m.work_order), Series([], m.work_order)

        def integrate(rhs):
            if rhs.val < 1 and not rhs.is_zero():
                if rhs.val < 0 or rhs[0]:
                    raise PolynomialityError("row-0 right-hand side has a constant or polar term")
            return Series([c * mpq(1, rhs.val + i) for i, c in enumerate(rhs.coeffs)], rhs.order, rhs.val)

    base_col = [one] * 5
    levels = [[[one] * 5 for _ in range(5)]]
    constants = [[mpq(0)] * 5]
    for k in range(1, K_max + 1):
        prev = levels[-1]
        cache = {}
        cols = []
        for j in range(5):
            key = tuple(id(prev[i][j]) for i in range(5))
            if key not in cache:
                q = _q_terms(prev, j, D, inv_L, A1, A2)
                p0 = integrate(_row0_rhs(q, D, L, A1, A2))
                cache[key] = [p0, p0 + q[3], p0 + q[2], p0 + q[1], p0 + q[0]]
            cols.append(cache[key])
        level = [[cols[j][i] for j in range(5)] for i in range(5)]
        levels.append(level)
        if fixed_constants is not None:
            consts = fixed_constants[k]
        else:
            consts = _solve_constants(levels, k, kind, zero, policy)
        constants.append(consts)
        new_cols = {}
        for j in range(5):
            key = (id(cols[j]), consts[j])
            if key not in new_cols:
                new_cols[key] = _add_const(cols[j], consts[j], kind)
            for i in range(5):
                level[i][j] = new_cols[key][i]
    del base_col
    return levels, constants


def build_rtable(K_max: int = 8, mirror=None, odd_constants=0, poison=None) -> RTable:
    """Solve levels 0..K_max.

    odd_constants: the symplectic condition fixes the L^0 part of row 0 only at
    even levels.  At odd levels the value is taken from this argument: a
    scalar (default 0), a dict keyed by level or (level, column), or
    ``"strict"`` to raise :class:`NormalizationError` instead.
    poison: optional (level, column, delta) added to one solved constant; the
    table is then rebuilt with the perturbed constants.  A test hook for
    negative controls.
    mirror: if given, the series pipeline is run independently as well.
    """
    FrobeniusData().base_case()
    sym, consts = _build(K_max, "sym", None, odd_constants)
    if poison:
        k, j, delta = poison
        if k > K_max:
            raise ValueError(f"poisoned level {k} is beyond max-k {K_max}")
        consts = [list(c) for c in consts]
        consts[k][j] = consts[k][j] + mpq(delta)
        sym, _ = _build(K_max, "sym", None, odd_constants, fixed_constants=consts)
    ser = None
    if mirror is not None:
        ser, ser_consts = _build(K_max, "ser", mirror, odd_constants,
                                 fixed_constants=consts if poison else None)
        if ser_consts != consts:
            raise NormalizationError("series and symbolic pipelines chose different constants")
    return RTable(K_max, sym, ser, consts, mirror, odd_constants)


def symplectic_residual(table: RTable, k: int, kind: str = "sym"):
    levels = table.sym if kind == "sym" else table.ser
    zero = fr.ZERO if kind == "sym" else Series([], table.mirror.work_order)
    return symplectic_matrix(levels, k, zero)


def flatness_residuals(table: RTable, k: int, kind: str = "sym") -> list:
    """The five modified flatness residuals at level k, per column j."""
    if kind == "sym":
        D, A1, A2 = d_derive, fr.A1, fr.A2
        inv_L = fr.L**-1
        levels = table.sym
    else:
        m = table.mirror
        D, A1, A2 = Series.d_op, m.A1, m.A2
        inv_L = m.L.mul_inv()
        levels = table.ser

    def P(kk, i, j):
        return levels[kk][i][j]

    out = []
    for j in range(5):
        if k == 0:
            res = [P(0, 4, j) - P(0, 0, j), P(0, 3, j) - P(0, 4, j), P(0, 2, j) - P(0, 3, j),
                   P(0, 1, j) - P(0, 2, j), P(0, 0, j) - P(0, 1, j)]
        else:
            res = [
                P(k, 4, j) - P(k, 0, j) - D(P(k - 1, 0, j)) * inv_L,
                P(k, 3, j) - P(k, 4, j) - D(P(k - 1, 4, j)) * inv_L - A1 * P(k - 1, 4, j),
                P(k, 2, j) - P(k, 3, j) - D(P(k - 1, 3, j)) * inv_L - A2 * P(k - 1, 3, j),
                P(k, 1, j) - P(k, 2, j) - D(P(k - 1, 2, j)) * inv_L + A2 * P(k - 1, 2, j),
                P(k, 0, j) - P(k, 1, j) - D(P(k - 1, 1, j)) * inv_L + A1 * P(k - 1, 1, j),
            ]
        out.append(res)
    return out


def row0_is_laurent(table: RTable, k: int) -> bool:
    return all(is_laurent(table.sym[k][0][j]) for j in range(5))


def derivative_lemmas(table: RTable, k: int, i: int, j: int) -> tuple:
    """(A2 identity holds, D2A1 identity holds) for the entry P~^k_{ij}.

    The identities: d/dA2 P~^k_{ij} = [i = 2] P~^{k-1}_{3j} and
    d/d(D2A1) P~^k_{ij} = [i = 1] L^-2 P~^{k-3}_{4j}.
    """
    P = table.sym
    f = P[k][i][j]
    want_a2 = P[k - 1][3][j] if i == 2 and k >= 1 else fr.ZERO
    want_d2 = P[k - 3][4][j] * fr.L**-2 if i == 1 and k >= 3 else fr.ZERO
    return partial_A2(f) == want_a2, partial_D2A1(f) == want_d2

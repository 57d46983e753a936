"""Graph-sum assembly of the potentials F_{g,n} and the anomaly-equation checks.

Two interchangeable summation strategies are provided.

``character``  Every contribution factors as (rational part) * zeta^(-e_v p_v)
    per vertex.  When P~ does not depend on its column index, summing over
    the decoration p_v in Z/5 replaces the phase by 5 * [e_v = 0 mod 5], and
    by orbit counting the sum over decorated classes weighted by
    1/|Aut(decorated)| equals the sum over all maps p weighted by
    1/|Aut(undecorated)|.  Phases are tracked mod 5 and vertices are summed
    out as soon as their last edge has been placed.

``explicit``  The contribution formula evaluated literally for each decorated
    class, with zeta arithmetic in Q(zeta5) and automorphisms recomputed per
    decoration.  Slower; used to cross-check the character engine.

Both run over any coefficient algebra: ring elements (symbolic pipeline) or
truncated series (series pipeline).
"""
from __future__ import annotations

import multiprocessing
from dataclasses import dataclass, field
from math import factorial

from gmpy2 import mpq

from . import freering as fr
from .cyclo import Cyc, zeta_pow
from .freering import Elem, d_derive, evaluate_to_series, partial_A2, partial_D2A1
from .graphs import decorations, enumerate_graphs, flag_assignments, vertex_dimension
from .intnum import psi_integral
from .rmatrix import INV, DepthError, K_lift, RTable
from .series import Series, const

__all__ = [
    "Algebra",
    "Potential",
    "inv",
    "required_depth",
    "vertex_contribution",
    "edge_contribution",
    "leg_contribution",
    "edge_derivative_A2",
    "edge_derivative_D2A1",
    "edge_lemmas",
    "string_check",
    "potential",
    "t_derivative",
    "hae_check",
    "gw_expansion",
]


def inv(c: int) -> int:
    """The involution on sectors: 0 -> 0, i -> 5 - i."""
    return INV[c]


# Level offset between the z^m coefficient of the vertex translation and the
# R-matrix row it reads.  "shifted" is z(1 - R^-1(z) 1); "unshifted" reads level m.
TRANSLATIONS = {"shifted": 1, "unshifted": 0}


class Algebra:
    """Where P~, K_i/L^i and scalars live: ``"sym"`` ring elements or ``"ser"`` series."""

    def __init__(self, table: RTable, kind: str = "sym", t_denominator=5, translation: str = "shifted"):
        if translation not in TRANSLATIONS:
            raise ValueError(f"unknown translation convention {translation!r}")
        self.table = table
        self.kind = kind
        self.t_den = mpq(t_denominator)
        self.t_shift = TRANSLATIONS[translation]
        if kind == "sym":
            self.zero, self.one = fr.ZERO, fr.ONE
            self._kl = [K_lift(i) * fr.L ** (-i) for i in range(5)]
        else:
            if table.ser is None:
                raise ValueError("series pipeline requested but the table has no series data")
            m = table.mirror
            self.zero, self.one = Series([], m.work_order), const(1, m.work_order)
            inv_l = m.L.mul_inv()
            self._kl = [m.K[i] * inv_l**i if i else self.one for i in range(5)]

    def P(self, k: int, i: int, j: int):
        if k < 0:
            return self.zero
        self.table.require(k)
        return self.table.P(k, i, j, self.kind)

    def KL(self, i: int):
        return self._kl[i]

    def is_zero(self, x) -> bool:
        return x.is_zero()


# -- local contributions ------------------------------------------------------


def _compositions(total: int, parts: int):
    """Ordered tuples of `parts` positive integers adding up to `total`."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def vertex_contribution(alg: Algebra, gv: int, flags, p: int | None = None, col: int = 0):
    """Vertex weight as {phase mod 5: value} read from column `col` (p None), or
    the single value at decoration p.

    Sum over k t-insertions with psi-powers m_i >= 2 of
    5^(2g-2+n+k)/k! <tau_flags tau_m1 ... tau_mk> prod ((-1)^m_i / 5) P~^{m_i - 1}_{0,p},
    the phase of a term being sum (m_i - 1) = rem.  The coefficient of z^m in the
    translation z(1 - R^-1(z) 1) comes from level m - 1 of R^-1.
    """
    flags = tuple(flags)
    n = len(flags)
    if 2 * gv - 2 + n <= 0:
        raise ValueError(f"unstable vertex (g={gv}, n={n})")
    rem = 3 * gv - 3 + n - sum(flags)
    graded: dict = {}
    if rem < 0:
        return graded if p is None else alg.zero
    if p is not None:
        col = p
    for k in range(rem + 1):
        pref = mpq(5) ** (2 * gv - 2 + n + k) / factorial(k)
        acc = None
        for comp in _compositions(rem, k):
            ms = tuple(c + 1 for c in comp)
            w = psi_integral(gv, flags + ms)
            if not w:
                continue
            term = None
            for mi in ms:
                t = alg.P(mi - alg.t_shift, 0, col) * (mpq((-1) ** mi) / alg.t_den)
                term = t if term is None else term * t
            term = alg.one * w if term is None else term * w
            acc = term if acc is None else acc + term
        if acc is None:
            continue
        acc = acc * pref
        phase = (rem + k * (1 - alg.t_shift)) % 5
        if p is not None:
            acc = acc * zeta_pow(-phase * p)
            graded[0] = acc if 0 not in graded else graded[0] + acc
        else:
            graded[phase] = acc if phase not in graded else graded[phase] + acc
    if p is not None:
        return graded.get(0, alg.zero)
    return graded


def edge_contribution(alg: Algebra, b1: int, b2: int, p1: int | None = None, p2: int | None = None,
                      cols=(0, 0)):
    """Edge weight; graded as {phase at v1 mod 5: value} when p1, p2 are None,
    with P~ read from the columns `cols` at the two ends.

    The phase at v2 is then b1 + b2 + 1 minus the phase at v1 (mod 5).
    """
    alg.table.require(b1 + b2 + 1)
    sign0 = (-1) ** (b1 + b2)
    if p1 is None:
        graded: dict = {}
        for m in range(b2 + 1):
            for r in range(5):
                t = alg.P(b1 + m + 1, inv(r), cols[0]) * alg.P(b2 - m, r, cols[1])
                if alg.is_zero(t):
                    continue
                t = t * mpq(sign0 * (-1) ** m, 5)
                u1 = (b1 + m + 1 + inv(r)) % 5
                graded[u1] = t if u1 not in graded else graded[u1] + t
        return graded
    total = alg.zero
    for m in range(b2 + 1):
        for r in range(5):
            t = alg.P(b1 + m + 1, inv(r), p1) * alg.P(b2 - m, r, p2)
            phase = zeta_pow(-(b1 + m + 1 + inv(r)) * p1 - (b2 - m + r) * p2)
            total = total + t * (phase * mpq(sign0 * (-1) ** m, 5))
    return total


def leg_contribution(alg: Algebra, c: int, a: int, p: int | None = None, col: int = 0):
    """Leg weight for insertion phi_c with flag value a; returns (value, phase)
    read from column `col` when p is None."""
    ci = inv(c)
    alg.table.require(a)
    val = alg.KL(ci) * alg.P(a, ci, col if p is None else p) * mpq((-1) ** a, 5)
    if p is None:
        return val, (a + ci) % 5
    return val * zeta_pow(-(a + ci) * p)


def edge_derivative_A2(alg: Algebra, b1: int, b2: int, p1: int, p2: int):
    """Closed form of the A2-derivative of an edge weight (telescoped sum)."""
    t = alg.P(b1, 3, p1) * alg.P(b2, 3, p2)
    return t * (zeta_pow(-(b1 + 3) * p1 - (b2 + 3) * p2) * mpq((-1) ** (b1 + b2), 5))


def edge_derivative_D2A1(alg: Algebra, b1: int, b2: int, p1: int, p2: int):
    """Closed form of the D2A1-derivative of an edge weight: three surviving terms."""
    total = alg.zero
    for m in range(3):
        t = alg.P(b1 + m - 2, 4, p1) * alg.P(b2 - m, 4, p2)
        total = total + t * (zeta_pow(-(b1 + m + 2) * p1 - (b2 - m + 4) * p2) * mpq((-1) ** m))
    return total * fr.L**-2 * mpq((-1) ** (b1 + b2), 5)


def edge_lemmas(alg: Algebra, b1: int, b2: int, p1: int, p2: int) -> dict:
    """Compare both edge-derivative closed forms with direct partials, and test
    the half-edge swap symmetry, for one decorated edge."""
    e = edge_contribution(alg, b1, b2, p1, p2)
    return {
        "A2": partial_A2(e) == edge_derivative_A2(alg, b1, b2, p1, p2),
        "D2A1": partial_D2A1(e) == edge_derivative_D2A1(alg, b1, b2, p1, p2),
        "swap": e == edge_contribution(alg, b2, b1, p2, p1),
    }


# -- graph sums -------------------------------------------------------------------


def required_depth(g: int, n: int) -> int:
    """Smallest R-matrix depth touched by the graph sum for F_{g,n}."""
    need = 0
    for gr in enumerate_graphs(g, n):
        dims = [vertex_dimension(gr, v) for v in range(gr.n_vertices)]
        need = max(need, max(d + 1 for d in dims))
        for a, b in gr.edges:
            need = max(need, (dims[a] + 1 if a == b else dims[a] + dims[b] + 1))
    return need


def _flag_lists(gr, legs_a, half_b):
    per = [[] for _ in range(gr.n_vertices)]
    for i, v in enumerate(gr.legs):
        per[v].append(legs_a[i])
    for e, (a, b) in enumerate(gr.edges):
        per[a].append(half_b[2 * e])
        per[b].append(half_b[2 * e + 1])
    return per


class _Memo:
    def __init__(self, alg):
        self.alg = alg
        self.vertex: dict = {}
        self.edge: dict = {}
        self.leg: dict = {}

    def vtx(self, gv, flags, p=None, col=0):
        key = (gv, tuple(sorted(flags)), p, col)
        if key not in self.vertex:
            self.vertex[key] = vertex_contribution(self.alg, gv, key[1], p, col)
        return self.vertex[key]

    def edg(self, b1, b2, p1=None, p2=None, cols=(0, 0)):
        key = (b1, b2, p1, p2, cols)
        if key not in self.edge:
            self.edge[key] = edge_contribution(self.alg, b1, b2, p1, p2, cols)
        return self.edge[key]

    def lg(self, c, a, p=None, col=0):
        key = (c, a, p, col)
        if key not in self.leg:
            self.leg[key] = leg_contribution(self.alg, c, a, p, col)
        return self.leg[key]


def _graph_dp(gr, insertions, memo: _Memo, deco=None):
    """Flag sum for one graph with phases tracked mod 5.

    deco None: character mode, each vertex closes with the selection e_v = 0
    and the sum is weighted by 5^|V|.  Otherwise P~ is read from the columns
    `deco`, closing vertex v adds p_v * e_v to a running phase Phi, and the
    result is sum_Phi zeta^-Phi * S_Phi (no weight; the caller divides by Aut).
    """
    alg = memo.alg
    nv = gr.n_vertices
    cols = tuple(deco) if deco is not None else (0,) * nv
    bridges = [(e, a, b) for e, (a, b) in enumerate(gr.edges) if a != b]
    remaining = [0] * nv
    for _, a, b in bridges:
        remaining[a] += 1
        remaining[b] += 1

    def close(v, states, vval):
        out: dict = {}
        for (st, phi), acc in states.items():
            s = list(st)
            sv, s[v] = s[v], 0
            key_s = tuple(s)
            if deco is None:
                w = vval.get((-sv) % 5)
                if w is not None:
                    k = (key_s, 0)
                    out[k] = acc * w if k not in out else out[k] + acc * w
                continue
            for e, w in vval.items():
                k = (key_s, (phi + cols[v] * (sv + e)) % 5)
                out[k] = acc * w if k not in out else out[k] + acc * w
        return out

    totals: dict = {}
    for legs_a, half_b in flag_assignments(gr):
        flags = _flag_lists(gr, legs_a, half_b)
        vvals = [memo.vtx(gr.genera[v], flags[v], col=cols[v]) for v in range(nv)]
        if any(not vv for vv in vvals):
            continue
        base = [0] * nv
        factor = None
        dead = False
        for i, v in enumerate(gr.legs):
            val, ph = memo.lg(insertions[i], legs_a[i], col=cols[v])
            factor = val if factor is None else factor * val
            base[v] += ph
        for e, (a, b) in enumerate(gr.edges):
            if a == b:
                b1, b2 = half_b[2 * e], half_b[2 * e + 1]
                graded = memo.edg(b1, b2, cols=(cols[a], cols[a]))
                if not graded:
                    dead = True
                    break
                val = None
                for t in graded.values():
                    val = t if val is None else val + t
                factor = val if factor is None else factor * val
                base[a] += b1 + b2 + 1
        if dead:
            continue
        factor = alg.one if factor is None else factor
        states = {(tuple(x % 5 for x in base), 0): factor}
        left = list(remaining)
        for v in range(nv):
            if left[v] == 0:
                states = close(v, states, vvals[v])
        for e, a, b in bridges:
            if not states:
                break
            b1, b2 = half_b[2 * e], half_b[2 * e + 1]
            graded = memo.edg(b1, b2, cols=(cols[a], cols[b]))
            tot = b1 + b2 + 1
            new: dict = {}
            for (st, phi), acc in states.items():
                for u1, val in graded.items():
                    s = list(st)
                    s[a] = (s[a] + u1) % 5
                    s[b] = (s[b] + tot - u1) % 5
                    k = (tuple(s), phi)
                    new[k] = acc * val if k not in new else new[k] + acc * val
            states = new
            left[a] -= 1
            left[b] -= 1
            for v in (a, b):
                if left[v] == 0:
                    states = close(v, states, vvals[v])
        for (_, phi), acc in states.items():
            totals[phi] = acc if phi not in totals else totals[phi] + acc
    if deco is None:
        total = totals.get(0)
        return alg.zero if total is None else total * (mpq(5) ** nv / gr.aut)
    total = alg.zero
    for phi, acc in sorted(totals.items()):
        total = total + (acc if phi == 0 else acc * zeta_pow(-phi))
    return total


def _graph_character(gr, insertions, memo: _Memo):
    return _graph_dp(gr, insertions, memo)


def _graph_explicit(gr, insertions, memo: _Memo):
    total = memo.alg.zero
    for dg in decorations(gr):
        total = total + _graph_dp(gr, insertions, memo, dg.deco) * mpq(1, dg.aut)
    return total


def _graph_literal(gr, insertions, memo: _Memo):
    """The contribution formula evaluated term by term for every decorated class."""
    alg = memo.alg
    total = alg.zero
    for dg in decorations(gr):
        p = dg.deco
        acc_graph = alg.zero
        for legs_a, half_b in flag_assignments(gr):
            flags = _flag_lists(gr, legs_a, half_b)
            term = alg.one
            for v in range(gr.n_vertices):
                term = term * memo.vtx(gr.genera[v], flags[v], p[v])
            for e, (a, b) in enumerate(gr.edges):
                term = term * memo.edg(half_b[2 * e], half_b[2 * e + 1], p[a], p[b])
            for i, v in enumerate(gr.legs):
                term = term * memo.lg(insertions[i], legs_a[i], p[v])
            acc_graph = acc_graph + term
        total = total + acc_graph * mpq(1, dg.aut)
    return total


ENGINES = {"character": _graph_character, "explicit": _graph_explicit, "literal": _graph_literal}


@dataclass
class Potential:
    g: int
    insertions: tuple
    value: object
    kind: str = "sym"
    graphs: int = 0
    meta: dict = field(default_factory=dict)

    def series(self, mirror) -> Series:
        if self.kind == "ser":
            return self.value
        return evaluate_to_series(self.value, mirror)

    def c1_degree(self) -> tuple:
        """(min, max) exponent of C1^-1 across monomials."""
        lo, hi = self.value.exponent_range("C1")
        return (-hi, -lo)


def potential(table: RTable, g: int, insertions=(), kind: str = "sym", engine: str = "auto",
              t_denominator=5, translation: str = "shifted", jobs: int = 1) -> Potential:
    """F_{g,n}(phi_c1, ..., phi_cn) as a graph sum.

    ``engine="auto"`` picks the character engine when P~ is column-independent
    and the explicit one otherwise.  ``jobs > 1`` spreads the graph list over
    forked worker processes.
    """
    insertions = tuple(insertions)
    n = len(insertions)
    if 2 * g - 2 + n <= 0:
        raise ValueError(f"unstable (g, n) = ({g}, {n})")
    need = required_depth(g, n)
    if need > table.K_max:
        raise DepthError(need, table.K_max)
    alg = Algebra(table, kind, t_denominator, translation)
    uniform = table.column_uniform()
    if engine == "auto":
        engine = "character" if uniform else "explicit"
    if engine == "character" and not uniform:
        raise ValueError("character engine needs column-independent P~; use engine='explicit'")
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    graphs = enumerate_graphs(g, n)
    run = ENGINES[engine]
    total = alg.zero
    for part in _graph_parts(graphs, insertions, alg, run, jobs):
        total = total + part
    if kind == "sym" and isinstance(total, Elem):
        total = _rationalize(total)
    return Potential(g, insertions, total, kind, len(graphs), {"engine": engine, "depth": need})


_FORK_STATE = None
_FORK_MEMO = None


def _fork_worker(i):
    global _FORK_MEMO
    graphs, insertions, alg, run = _FORK_STATE
    if _FORK_MEMO is None:
        _FORK_MEMO = _Memo(alg)
    return run(graphs[i], insertions, _FORK_MEMO)


def _graph_parts(graphs, insertions, alg, run, jobs):
    if jobs <= 1 or len(graphs) < 2 or "fork" not in multiprocessing.get_all_start_methods():
        memo = _Memo(alg)
        return [run(gr, insertions, memo) for gr in graphs]
    global _FORK_STATE, _FORK_MEMO
    _FORK_STATE, _FORK_MEMO = (graphs, insertions, alg, run), None
    try:
        with multiprocessing.get_context("fork").Pool(min(jobs, len(graphs))) as pool:
            return pool.map(_fork_worker, range(len(graphs)), chunksize=1)
    finally:
        _FORK_STATE = None


def _rationalize(f: Elem) -> Elem:
    return Elem({k: (c.rational() if isinstance(c, Cyc) and c.is_rational() else c) for k, c in f.t.items()})


# -- derived checks ----------------------------------------------------------------


def t_derivative(table: RTable, pot: Potential, k: int = 1, mirror=None, **kw) -> dict:
    """d^k F / dT^k two ways: extra phi_1 legs in the graph sum, and (D / C1)^k.

    Returns a dict with both ring values and agreement flags; the ring-level
    comparison is exact, the series-level comparison runs through order N
    when ``mirror`` is supplied.
    """
    if k == 0:
        return {"graph": pot, "chain": pot.value, "ring_equal": True, "series_equal": True}
    graph_pot = potential(table, pot.g, pot.insertions + (1,) * k, **kw)
    chain = pot.value
    inv_c1 = fr.C1**-1
    for _ in range(k):
        chain = d_derive(chain) * inv_c1
    out = {"graph": graph_pot, "chain": chain, "ring_equal": graph_pot.value == chain}
    if mirror is not None:
        ser = evaluate_to_series(pot.value, mirror, need=mirror.N + k)
        for _ in range(k):
            ser = Series.d_op(ser) / mirror.C1
        diff = evaluate_to_series(graph_pot.value, mirror) - ser
        out["series_equal"] = diff.truncate(mirror.N).is_zero()
    return out


def string_check(table: RTable, g: int, insertions=(), **kw) -> bool:
    """F_{g,n+1}(..., phi_0) vanishes: the unit insertion with no descendants.

    Only meaningful when (g, n) itself is stable; otherwise ValueError.
    """
    if 2 * g - 2 + len(insertions) <= 0:
        raise ValueError(f"string equation needs a stable base, got (g, n) = ({g}, {len(insertions)})")
    return potential(table, g, tuple(insertions) + (0,), **kw).value.is_zero()


def hae_check(table: RTable, g: int, mirror=None, rhs_factor=mpq(1, 2), pots: dict | None = None,
              **kw) -> dict:
    """Residuals of both anomaly equations in the C3-eliminated ring (and on series)."""
    if g < 2:
        raise ValueError("the anomaly equations are stated for g >= 2")
    pots = {} if pots is None else pots

    def F(gg, ins):
        key = (gg, tuple(ins))
        if key not in pots:
            pots[key] = potential(table, gg, ins, **kw)
        return pots[key].value

    Fg = F(g, ())
    rhs_factor = mpq(rhs_factor)
    lhs1 = partial_A2(Fg) * fr.Elem.monomial(mpq(1, 5), L=4, C1=-2, C2=-2)
    lhs2 = partial_D2A1(Fg) * fr.Elem.monomial(mpq(1, 5), L=2, C1=-2)
    report = {}
    for name, lhs, c in (("first", lhs1, 2), ("second", lhs2, 1)):
        rhs = F(g - 1, (c, c))
        for i in range(1, g):
            rhs = rhs + F(g - i, (c,)) * F(i, (c,))
        res = lhs - rhs * rhs_factor
        entry = {"residual": res, "ring_zero": res.is_zero()}
        if mirror is not None:
            entry["series_zero"] = evaluate_to_series(res, mirror).truncate(mirror.N).is_zero()
        report[name] = entry
    report["potentials"] = pots
    return report


def gw_expansion(series: Series, mirror, d_max: int) -> list:
    """Coefficients of Theta^d / d! after substituting x = T^-1(Theta), d <= d_max."""
    if d_max > series.order:
        raise ValueError(f"series known through x^{series.order}, cannot expand to degree {d_max}")
    xt = mirror.T.truncate(max(d_max, 1)).revert()
    f = series.truncate(d_max) if series.order > d_max else series
    comp = f.compose(xt)
    return [comp[d] * factorial(d) for d in range(d_max + 1)]

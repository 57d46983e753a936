"""Stable graphs of genus g with n labeled legs, optionally decorated by Z/5.

A graph is stored as vertex genera, the vertex of each leg (leg i carries
label i + 1) and a sorted multiset of edges (u, v) with u <= v; u == v is a
self-loop.  Graphs here have at most a handful of vertices, so isomorphism is
settled by minimizing an encoding over all admissible vertex permutations.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product
from math import factorial

__all__ = [
    "StableGraph",
    "DecoratedGraph",
    "enumerate_graphs",
    "decorations",
    "flag_assignments",
    "vertex_dimension",
]


@dataclass(frozen=True)
class StableGraph:
    genera: tuple
    legs: tuple
    edges: tuple
    aut: int = 1

    @property
    def n_vertices(self) -> int:
        return len(self.genera)

    def valence(self, v: int) -> int:
        n = sum(1 for w in self.legs if w == v)
        for a, b in self.edges:
            n += (a == v) + (b == v)
        return n

    def h1(self) -> int:
        return len(self.edges) - len(self.genera) + 1

    def genus(self) -> int:
        return self.h1() + sum(self.genera)

    def half_edges(self) -> list:
        """Half-edges as (edge index, side); side 0 sits at edges[e][0]."""
        return [(e, s) for e in range(len(self.edges)) for s in (0, 1)]

    def half_edge_vertex(self, h) -> int:
        e, s = h
        return self.edges[e][s]

    def is_stable(self) -> bool:
        return all(2 * g - 2 + self.valence(v) > 0 for v, g in enumerate(self.genera))

    def is_connected(self) -> bool:
        nv = self.n_vertices
        seen = {0}
        stack = [0]
        adj = {v: set() for v in range(nv)}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        while stack:
            v = stack.pop()
            for w in adj[v] - seen:
                seen.add(w)
                stack.append(w)
        return len(seen) == nv

    def to_json(self) -> dict:
        return {"genera": list(self.genera), "legs": list(self.legs),
                "edges": [list(e) for e in self.edges], "aut": self.aut}


@dataclass(frozen=True)
class DecoratedGraph:
    graph: StableGraph
    deco: tuple
    aut: int

    def to_json(self) -> dict:
        d = self.graph.to_json()
        d["decoration"] = list(self.deco)
        d["aut"] = self.aut
        return d


def _encode(genera, legs, edges, labels, perm):
    """Encoding of the graph after relabeling vertex v as perm[v]."""
    nv = len(genera)
    inv = [0] * nv
    for v, pv in enumerate(perm):
        inv[pv] = v
    vert = tuple((genera[inv[i]], labels[inv[i]]) for i in range(nv))
    lg = tuple(perm[v] for v in legs)
    ed = tuple(sorted(tuple(sorted((perm[a], perm[b]))) for a, b in edges))
    return (vert, lg, ed)


def _canonical(genera, legs, edges, labels=None):
    """Return (canonical encoding, number of vertex permutations fixing the graph)."""
    nv = len(genera)
    labels = labels or (0,) * nv
    best = None
    count = 0
    ident = _encode(genera, legs, edges, labels, tuple(range(nv)))
    for perm in permutations(range(nv)):
        code = _encode(genera, legs, edges, labels, perm)
        if code == ident:
            count += 1
        if best is None or code < best:
            best = code
    return best, count


def _edge_factor(edges) -> int:
    out = 1
    mult: dict = {}
    for e in edges:
        mult[e] = mult.get(e, 0) + 1
    for (a, b), m in mult.items():
        out *= factorial(m)
        if a == b:
            out *= 2**m
    return out


def _from_code(code, labels=False) -> tuple:
    vert, lg, ed = code
    genera = tuple(g for g, _ in vert)
    return genera, lg, ed


def _automorphisms(genera, legs, edges, labels=None) -> int:
    _, vcount = _canonical(genera, legs, edges, labels)
    return vcount * _edge_factor(edges)


def _degenerations(genera, legs, edges):
    """All one-step degenerations: add a self-loop, or split a vertex along a new edge."""
    nv = len(genera)
    for v in range(nv):
        if genera[v] >= 1:
            g2 = list(genera)
            g2[v] -= 1
            yield tuple(g2), legs, tuple(sorted(edges + ((v, v),)))
    for v in range(nv):
        slots = [("leg", i) for i, w in enumerate(legs) if w == v]
        slots += [("edge", e, s) for e, ed in enumerate(edges) for s in (0, 1) if ed[s] == v]
        new = nv
        for g1 in range(genera[v] + 1):
            g2 = genera[v] - g1
            for choice in product((0, 1), repeat=len(slots)):
                n1 = choice.count(0) + 1
                n2 = choice.count(1) + 1
                if 2 * g1 - 2 + n1 <= 0 or 2 * g2 - 2 + n2 <= 0:
                    continue
                gen = list(genera) + [g2]
                gen[v] = g1
                lg = list(legs)
                ed = [list(x) for x in edges]
                for slot, side in zip(slots, choice):
                    if side:
                        if slot[0] == "leg":
                            lg[slot[1]] = new
                        else:
                            ed[slot[1]][slot[2]] = new
                ed.append([v, new])
                yield tuple(gen), tuple(lg), tuple(sorted(tuple(sorted(x)) for x in ed))


_enum_memo: dict = {}


def enumerate_graphs(g: int, n: int) -> list:
    """One representative per isomorphism class of stable graphs in G_{g,n}."""
    if g < 0 or n < 0 or 2 * g - 2 + n <= 0:
        raise ValueError(f"no stable graphs for (g, n) = ({g}, {n})")
    if (g, n) in _enum_memo:
        return _enum_memo[(g, n)]
    start = ((g,), (0,) * n, ())
    seen = {}
    frontier = [start]
    while frontier:
        nxt = []
        for gr in frontier:
            code, _ = _canonical(*gr)
            if code in seen:
                continue
            seen[code] = _from_code(code)
            nxt.extend(_degenerations(*seen[code]))
        frontier = nxt
    out = []
    for code in sorted(seen):
        genera, legs, edges = seen[code]
        out.append(StableGraph(genera, legs, edges, _automorphisms(genera, legs, edges)))
    _enum_memo[(g, n)] = out
    return out


def decorations(graph: StableGraph, order: int = 5):
    """One decorated graph per isomorphism class of maps p: V -> Z/order."""
    seen = set()
    for deco in product(range(order), repeat=graph.n_vertices):
        code, vcount = _canonical(graph.genera, graph.legs, graph.edges, deco)
        if code in seen:
            continue
        seen.add(code)
        yield DecoratedGraph(graph, deco, vcount * _edge_factor(graph.edges))


def vertex_dimension(graph: StableGraph, v: int) -> int:
    return 3 * graph.genera[v] - 3 + graph.valence(v)


def _bounded_tuples(n: int, budget: int):
    if n == 0:
        yield ()
        return
    for first in range(budget + 1):
        for rest in _bounded_tuples(n - 1, budget - first):
            yield (first,) + rest


def flag_assignments(graph: StableGraph):
    """Yield (leg values, half-edge values) passing every vertex dimension gate.

    Each t-insertion carries a psi-power of at least 2, so the flag values at a
    vertex add up to at most 3g(v) - 3 + n(v).  Half-edge values are indexed as
    in :meth:`StableGraph.half_edges`.
    """
    nv = graph.n_vertices
    flags = {v: [] for v in range(nv)}
    for i, w in enumerate(graph.legs):
        flags[w].append(("leg", i))
    for h in graph.half_edges():
        flags[graph.half_edge_vertex(h)].append(("half", h))
    per_vertex = [list(_bounded_tuples(len(flags[v]), vertex_dimension(graph, v))) for v in range(nv)]
    nh = 2 * len(graph.edges)
    for combo in product(*per_vertex):
        legs = [0] * len(graph.legs)
        half = [0] * nh
        for v, vals in enumerate(combo):
            for (kind, ref), a in zip(flags[v], vals):
                if kind == "leg":
                    legs[ref] = a
                else:
                    half[2 * ref[0] + ref[1]] = a
        yield tuple(legs), tuple(half)

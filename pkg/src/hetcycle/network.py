"""Heteroclinic graph on the cube edges, its cycles and switching nodes."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import game as gm
from .equilibria import HYPERBOLIC_TOL
from .errors import NonGenericError

__all__ = [
    "Edge",
    "HeteroclinicGraph",
    "build_graph",
    "graph_for",
    "enumerate_cycles",
    "cycle_edges",
    "name_cycles",
    "switching_nodes",
    "open_edge_violations",
    "to_dot",
]


@dataclass(frozen=True)
class Edge:
    """Oriented cube edge ``source -> target`` along coordinate ``direction``.

    ``faces`` are the ``n - 1`` faces containing the edge, ascending.
    """

    index: int
    source: int
    target: int
    direction: int
    faces: tuple

    @property
    def label(self) -> str:
        return f"g{self.index}"


@dataclass(frozen=True)
class HeteroclinicGraph:
    n: int
    edges: tuple
    cycles: tuple = ()

    @property
    def vertices(self) -> tuple:
        return tuple(range(1, 2 ** self.n + 1))

    def edge(self, index: int) -> Edge:
        return self.edges[index - 1]

    def out_edges(self, v: int) -> list:
        return [e for e in self.edges if e.source == v]

    def in_edges(self, v: int) -> list:
        return [e for e in self.edges if e.target == v]

    def edge_between(self, u: int, v: int) -> Edge | None:
        for e in self.edges:
            if e.source == u and e.target == v:
                return e
        return None

    def cycle_names(self) -> dict:
        return name_cycles(self)


def _cube_edges(n: int):
    """Unoriented edges ordered by direction bit weight, then by lower vertex."""
    out = []
    for bit in range(n):
        coord = n - 1 - bit
        for k in range(1, 2 ** n + 1):
            v = gm.vertex_coords(k, n)
            if v[coord] == 0:
                w = list(v)
                w[coord] = 1
                out.append((k, gm.vertex_index(w), coord))
    return out


def build_graph(spectra, tol: float = HYPERBOLIC_TOL) -> HeteroclinicGraph:
    """Orient every cube edge from the sign of the eigenvalue along it.

    The source has a positive and the target a negative eigenvalue along the
    edge.  Equal signs or a near-zero eigenvalue raise
    :class:`NonGenericError` naming the edge.
    """
    spectra = sorted(spectra, key=lambda r: r.vertex)
    n = len(spectra[0].exact_location)
    if len(spectra) != 2 ** n:
        raise NonGenericError(f"expected {2 ** n} vertex records, got {len(spectra)}")
    edges = []
    for index, (lo, hi, coord) in enumerate(_cube_edges(n), start=1):
        lam = []
        for k in (lo, hi):
            rec = spectra[k - 1]
            v = gm.vertex_coords(k, n)
            lam.append(rec.eigen_directions[gm.face_of(coord, v[coord])])
        if any(abs(float(x)) <= tol for x in lam):
            raise NonGenericError(f"edge v{lo}-v{hi}: zero eigenvalue along the edge")
        if lam[0] > 0 > lam[1]:
            src, dst = lo, hi
        elif lam[1] > 0 > lam[0]:
            src, dst = hi, lo
        else:
            raise NonGenericError(
                f"edge v{lo}-v{hi}: endpoint eigenvalues {lam[0]}, {lam[1]} have equal sign"
            )
        v = gm.vertex_coords(lo, n)
        faces = tuple(sorted(gm.face_of(i, v[i]) for i in range(n) if i != coord))
        edges.append(Edge(index, src, dst, coord, faces))
    graph = HeteroclinicGraph(n, tuple(edges))
    return HeteroclinicGraph(n, graph.edges, tuple(enumerate_cycles(graph)))


def graph_for(game: gm.PolymatrixGame) -> HeteroclinicGraph:
    from .equilibria import vertex_spectrum

    return build_graph(vertex_spectrum(game))


def cycle_edges(graph: HeteroclinicGraph, cycle) -> tuple:
    """Edge indices of a vertex cycle, in traversal order."""
    out = []
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        e = graph.edge_between(a, b)
        if e is None:
            raise NonGenericError(f"no edge v{a}->v{b} in graph")
        out.append(e.index)
    return tuple(out)


def _cycle_key(graph, cycle):
    return tuple(sorted(cycle_edges(graph, cycle), reverse=True))


def enumerate_cycles(graph: HeteroclinicGraph, max_len: int | None = None) -> list:
    """All simple directed cycles, each rotated to start at its smallest vertex.

    Depth-first search from every start vertex through larger vertices only,
    so each cycle is produced once.  Cycles are ordered by their edge sets,
    read from the largest edge index down, in descending order.
    """
    max_len = 2 ** graph.n if max_len is None else max_len
    succ = {v: sorted(e.target for e in graph.out_edges(v)) for v in graph.vertices}
    found = []
    for start in graph.vertices:
        stack = [(start, [start])]
        while stack:
            v, path = stack.pop()
            for w in succ[v]:
                if w == start:
                    found.append(tuple(path))
                elif w > start and w not in path and len(path) < max_len:
                    stack.append((w, path + [w]))
    found = sorted(set(found), key=lambda c: _cycle_key(graph, c), reverse=True)
    return found


def name_cycles(graph: HeteroclinicGraph) -> dict:
    """``{cycle tuple: "H1", ...}`` following the graph's cycle order."""
    return {c: f"H{k}" for k, c in enumerate(graph.cycles, start=1)}


def switching_nodes(graph: HeteroclinicGraph, spectra=None) -> set:
    """Vertices with at least two outgoing connections.

    When ``spectra`` is given, the count of positive eigenvalues must agree.
    """
    out = {v for v in graph.vertices if len(graph.out_edges(v)) >= 2}
    if spectra is not None:
        alt = {r.vertex for r in spectra if sum(x > 0 for x in r.eigen_directions.values()) >= 2}
        if alt != out:
            raise NonGenericError("out-degree and unstable dimension disagree")
    return out


def open_edge_violations(game: gm.PolymatrixGame, samples: int = 51) -> list:
    """Edges whose tangential field changes sign (or vanishes) in the open edge.

    Samples ``samples`` interior points per edge in exact arithmetic.
    """
    n = game.n_groups
    bad = []
    for index, (lo, _hi, coord) in enumerate(_cube_edges(n), start=1):
        base = [Fraction(x) for x in gm.vertex_coords(lo, n)]
        signs = set()
        for s in range(1, samples + 1):
            p = list(base)
            p[coord] = Fraction(s, samples + 1)
            signs.add(np.sign(float(gm.field_cube(game, p, exact=True)[coord])))
        if len(signs) != 1 or 0.0 in signs:
            bad.append(index)
    return bad


def to_dot(graph: HeteroclinicGraph) -> str:
    """DOT text with vertices ``v1..`` and edges labelled ``gamma k``."""
    lines = ["digraph heteroclinic {"]
    for v in graph.vertices:
        lines.append(f'  v{v} [label="v{v}"];')
    for e in graph.edges:
        lines.append(f'  v{e.source} -> v{e.target} [label="γ{e.index}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"

"""Dual-cone skeleton: characters, sector maps, structural sets and branch matrices.

Coordinates on an edge are the dual coordinates of the faces containing it,
in ascending face order.  Matrices act on column vectors: rows are output
faces, columns input faces.  A sector is the set of input vectors whose
successive images keep every active coordinate strictly positive; it is
stored as a list of linear forms that must all be positive.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from . import game as gm
from .equilibria import vertex_spectrum
from .errors import InputError, NonGenericError, NotStructuralError
from .network import HeteroclinicGraph, build_graph, cycle_edges

__all__ = [
    "CharacterVector",
    "HalfPlane",
    "Sector",
    "SectorMap",
    "SkeletonBranch",
    "StabilityVerdict",
    "Skeleton",
    "character",
    "branch_map",
    "structural_sets",
    "pick_canonical",
    "enumerate_s_branches",
    "build_skeleton",
    "skeleton_matrix",
    "cycle_matrix",
    "eigen_verdict",
    "matmul",
]

TIE_TOL = 1e-10


def matmul(a, b):
    """Exact product of nested-tuple matrices."""
    cols = list(zip(*b))
    return tuple(
        tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols)
        for row in a
    )


def _identity(k):
    return tuple(tuple(Fraction(int(i == j)) for j in range(k)) for i in range(k))


@dataclass(frozen=True)
class CharacterVector:
    vertex: int
    components: tuple
    active_faces: tuple

    def __getitem__(self, face: int) -> Fraction:
        return self.components[face - 1]


def character(record, n: int | None = None) -> CharacterVector:
    """Negated vertex eigenvalues placed on the faces containing the vertex."""
    if record.vertex is None:
        raise InputError("characters are defined at vertices only")
    n = len(record.exact_location) if n is None else n
    comps = [Fraction(0)] * (2 * n)
    for face, lam in record.eigen_directions.items():
        if lam == 0:
            raise NonGenericError(f"v{record.vertex}: zero eigenvalue on face {face}")
        comps[face - 1] = -Fraction(lam)
    return CharacterVector(record.vertex, tuple(comps), tuple(sorted(record.eigen_directions)))


@dataclass(frozen=True)
class HalfPlane:
    """Strict inequality ``coeffs . u > 0``."""

    coeffs: tuple

    def value(self, u) -> float:
        return sum(float(c) * float(x) for c, x in zip(self.coeffs, u))

    def normalized(self) -> "HalfPlane":
        """Scale to coprime integers when the coefficients are rational."""
        cs = [Fraction(c) for c in self.coeffs]
        den = math.lcm(*(c.denominator for c in cs))
        nums = [int(c * den) for c in cs]
        g = math.gcd(*nums) or 1
        return HalfPlane(tuple(Fraction(v // g) for v in nums))

    def trivial(self) -> bool:
        """Positive on the whole open orthant."""
        return all(c >= 0 for c in self.coeffs) and any(c > 0 for c in self.coeffs)

    def text(self, names) -> str:
        terms = []
        for c, name in zip(self.normalized().coeffs, names):
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = name if mag == 1 else f"{mag}{name}"
            terms.append((sign, body))
        if not terms:
            return "0 > 0"
        head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        tail = "".join(f" {s} {b}" for s, b in terms[1:])
        return f"{head}{tail} > 0"


@dataclass(frozen=True)
class Sector:
    """Open cone ``{u > 0 : f(u) > 0 for f in halfplanes}`` over ``faces``."""

    faces: tuple
    halfplanes: tuple = ()

    def contains(self, u, tol: float = 1e-12):
        """True, False, or None when ``u`` is within ``tol`` of a boundary ray."""
        scale = max(abs(float(x)) for x in u) or 1.0
        vals = [float(x) / scale for x in u]
        vals += [h.value(u) / (scale * max(abs(float(c)) for c in h.coeffs)) for h in self.halfplanes]
        if any(v < -tol for v in vals):
            return False
        if any(v <= tol for v in vals):
            return None
        return True

    def interval(self):
        """For two faces: the open interval of ``x = u_a / (u_a + u_b)`` in ``[0, 1]``.

        Returns ``(lo, hi, lo_form, hi_form)``; the forms are the half-planes
        that bind at each end (None at 0 or 1).  Empty sectors give ``lo >= hi``.
        """
        if len(self.faces) != 2:
            raise InputError("interval view needs exactly two active faces")
        lo, hi = Fraction(0), Fraction(1)
        lo_f = hi_f = None
        for h in self.halfplanes:
            a, b = (Fraction(c) for c in h.coeffs)
            slope = a - b
            if slope == 0:
                if b <= 0:
                    return Fraction(1), Fraction(0), h, h
                continue
            root = -b / slope
            if slope > 0 and root > lo:
                lo, lo_f = root, h
            elif slope < 0 and root < hi:
                hi, hi_f = root, h
        return lo, hi, lo_f, hi_f

    def is_empty(self) -> bool:
        if len(self.faces) == 2:
            lo, hi, _, _ = self.interval()
            return lo >= hi
        return False

    def minimal(self) -> "Sector":
        """Drop orthant-implied and, for two faces, non-binding half-planes."""
        hs = []
        for h in self.halfplanes:
            if h.trivial():
                continue
            n = h.normalized()
            if n not in hs:
                hs.append(n)
        if len(self.faces) == 2 and hs:
            lo, hi, lo_f, hi_f = Sector(self.faces, tuple(hs)).interval()
            if lo < hi:
                hs = [h for h in (lo_f, hi_f) if h is not None]
        return Sector(self.faces, tuple(hs))

    def pullback_forms(self, mat) -> tuple:
        """Half-planes in the coordinates ``v`` where ``u = mat v``."""
        hs = tuple(
            HalfPlane(tuple(sum((h.coeffs[r] * mat[r][c] for r in range(len(mat))), Fraction(0))
                            for c in range(len(mat[0]))))
            for h in self.halfplanes
        )
        return hs

    def describe(self) -> list:
        names = [f"u{f}" for f in self.faces]
        return [h.text(names) for h in self.halfplanes]


@dataclass(frozen=True)
class SectorMap:
    from_edge: int
    to_edge: int
    vertex: int
    pivot_face: int
    full_matrix: tuple
    matrix: tuple
    sector: Sector


def branch_map(graph: HeteroclinicGraph, spectra, g_in: int, g_out: int) -> SectorMap:
    """Local linear map between consecutive edges at their common vertex.

    ``L(y)_j = y_j - (chi_j / chi_{j*}) y_{j*}`` with ``j*`` the face at the
    vertex orthogonal to the outgoing edge.
    """
    e_in, e_out = graph.edge(g_in), graph.edge(g_out)
    if e_in.target != e_out.source:
        raise InputError(f"edges {g_in} and {g_out} are not consecutive")
    v = e_in.target
    rec = next(r for r in spectra if r.vertex == v)
    chi = character(rec, graph.n)
    vc = gm.vertex_coords(v, graph.n)
    pivot = gm.face_of(e_out.direction, vc[e_out.direction])
    size = 2 * graph.n
    full = tuple(
        tuple(
            Fraction(int(j == k)) - (chi[j + 1] / chi[pivot] if k + 1 == pivot else 0)
            for k in range(size)
        )
        for j in range(size)
    )
    mat = tuple(tuple(full[r - 1][c - 1] for c in e_in.faces) for r in e_out.faces)
    sector = Sector(e_in.faces, tuple(HalfPlane(row) for row in mat)).minimal()
    return SectorMap(g_in, g_out, v, pivot, full, mat, sector)


def structural_sets(graph: HeteroclinicGraph) -> list:
    """All minimum-cardinality edge sets meeting every cycle, sorted."""
    if not graph.cycles:
        raise InputError("graph has no cycles")
    cyc = [set(cycle_edges(graph, c)) for c in graph.cycles]
    idx = [e.index for e in graph.edges]
    for k in range(1, len(idx) + 1):
        hits = [s for s in itertools.combinations(idx, k) if all(c & set(s) for c in cyc)]
        if hits:
            return hits
    return []


def pick_canonical(sets, graph: HeteroclinicGraph | None = None) -> tuple:
    """Prefer the set with most cycle-edge incidences, then the smallest indices.

    Without a graph this is plain lexicographic order.
    """
    if graph is None:
        return min(sets)
    cyc = [set(cycle_edges(graph, c)) for c in graph.cycles]

    def load(s):
        return sum(e in c for e in s for c in cyc)

    return min(sets, key=lambda s: (-load(s), s))


@dataclass(frozen=True)
class SkeletonBranch:
    id: int
    edges: tuple
    matrix: tuple
    sector: Sector

    @property
    def source(self) -> int:
        return self.edges[0]

    @property
    def target(self) -> int:
        return self.edges[-1]

    @property
    def name(self) -> str:
        return f"xi{self.id}"


def enumerate_s_branches(S, graph: HeteroclinicGraph) -> list:
    """Admissible edge paths from an S-edge to the next S-edge.

    Returns edge tuples ordered by source position in S, target position in
    S, then sorted edge content.
    """
    S = tuple(sorted(S))
    sset = set(S)
    for c in graph.cycles:
        if not sset & set(cycle_edges(graph, c)):
            names = " ".join(f"v{v}" for v in c)
            raise NotStructuralError(f"cycle ({names}) avoids the edge set", cycle=c)
    paths = []
    for s in S:
        stack = [(s,)]
        while stack:
            path = stack.pop()
            head = graph.edge(path[-1])
            for nxt in graph.out_edges(head.target):
                if nxt.index in sset:
                    paths.append(path + (nxt.index,))
                elif nxt.index in path[1:]:
                    raise NotStructuralError("an S-free loop is reachable")
                else:
                    stack.append(path + (nxt.index,))
    paths.sort(key=lambda p: (S.index(p[0]), S.index(p[-1]), tuple(sorted(p))))
    return paths


def _compose(graph, spectra, path):
    k = graph.n - 1
    mat = _identity(k)
    forms = []
    for a, b in zip(path, path[1:]):
        step = branch_map(graph, spectra, a, b)
        mat = matmul(step.matrix, mat)
        forms.extend(HalfPlane(row) for row in mat)
    sector = Sector(graph.edge(path[0]).faces, tuple(forms)).minimal()
    return mat, sector


@dataclass(frozen=True)
class StabilityVerdict:
    subject: str
    eigenvalues: tuple
    perron_vector: tuple | None
    minor_vector: tuple | None
    in_sector: bool
    verdict: str
    target: str | None = None


@dataclass
class Skeleton:
    """Everything the projective reduction needs for one game."""

    game: gm.PolymatrixGame
    spectra: list
    graph: HeteroclinicGraph
    S: tuple
    branches: list

    def branch(self, ident) -> SkeletonBranch:
        if isinstance(ident, str):
            ident = int(ident.removeprefix("xi"))
        return self.branches[ident - 1]

    def branches_from(self, edge: int) -> list:
        return [b for b in self.branches if b.source == edge]

    def decompose(self, cycle, base_edge: int | None = None) -> list:
        """Branch ids whose concatenation is ``cycle``, starting at ``base_edge``."""
        edges = list(cycle_edges(self.graph, tuple(cycle)))
        s_pos = [i for i, e in enumerate(edges) if e in self.S]
        if not s_pos:
            raise NotStructuralError("cycle avoids the structural set", cycle=tuple(cycle))
        if base_edge is None:
            base_edge = min(edges[i] for i in s_pos)
        if base_edge not in edges or base_edge not in self.S:
            raise InputError(f"edge {base_edge} is not an S-edge of the cycle")
        r = edges.index(base_edge)
        edges = edges[r:] + edges[:r] + [base_edge]
        ids, start = [], 0
        for i in range(1, len(edges)):
            if edges[i] in self.S:
                seg = tuple(edges[start:i + 1])
                match = [b.id for b in self.branches if b.edges == seg]
                if not match:
                    raise InputError(f"no branch with edges {seg}")
                ids.append(match[0])
                start = i
        return ids

    def cycle_of(self, branch_ids) -> tuple:
        """Canonical vertex cycle traced by a closed branch itinerary."""
        edges = []
        for bid in branch_ids:
            edges.extend(self.branch(bid).edges[:-1])
        verts = [self.graph.edge(e).source for e in edges]
        r = verts.index(min(verts))
        return tuple(verts[r:] + verts[:r])


def build_skeleton(game: gm.PolymatrixGame, S=None) -> Skeleton:
    spectra = vertex_spectrum(game)
    graph = build_graph(spectra)
    if S is None:
        S = pick_canonical(structural_sets(graph), graph)
    S = tuple(sorted(S))
    branches = []
    for k, path in enumerate(enumerate_s_branches(S, graph), start=1):
        mat, sector = _compose(graph, spectra, path)
        branches.append(SkeletonBranch(k, path, mat, sector))
    return Skeleton(game, spectra, graph, S, branches)


def skeleton_matrix(skel: Skeleton, ident):
    """``(matrix, sector)`` of one S-branch."""
    b = skel.branch(ident)
    return b.matrix, b.sector


def cycle_matrix(skel: Skeleton, branch_ids):
    """Product matrix and pulled-back sector of a closed branch itinerary.

    ``branch_ids`` are applied left to right, so the matrix is
    ``M_last ... M_first`` on the first branch's source coordinates.
    """
    branches = [skel.branch(b) for b in branch_ids]
    for a, b in zip(branches, branches[1:] + branches[:1]):
        if a.target != b.source:
            raise InputError(f"branches {a.name} and {b.name} do not concatenate")
    k = len(branches[0].matrix)
    mat = _identity(k)
    forms = []
    for b in branches:
        forms.extend(b.sector.pullback_forms(mat))
        mat = matmul(b.matrix, mat)
    sector = Sector(branches[0].sector.faces, tuple(forms)).minimal()
    return mat, sector


def _eigvec(m, lam):
    a, b = float(m[0][0]), float(m[0][1])
    c, d = float(m[1][0]), float(m[1][1])
    v1 = (b, lam - a)
    v2 = (lam - d, c)
    v = v1 if abs(v1[0]) + abs(v1[1]) >= abs(v2[0]) + abs(v2[1]) else v2
    if abs(v[1]) > 1e-300:
        return (v[0] / v[1], 1.0)
    return (1.0, 0.0)


def _locate(sector, v):
    """Membership of ``v`` or ``-v``."""
    got = sector.contains(v)
    if got is False:
        got = sector.contains(tuple(-x for x in v))
    return got


def eigen_verdict(matrix, sector: Sector, subject: str = "", siblings: dict | None = None
                  ) -> StabilityVerdict:
    """Perron-Frobenius verdict for a 2x2 return matrix on its sector.

    attracting: the dominant eigenvector lies in the open sector;
    repelling: the subdominant one does; otherwise escapes-sector, naming
    the sibling sector (same edge) holding the dominant eigenvector, or
    ``boundary`` when it lies on no sibling.  Complex, tied or nonpositive
    eigenvalues give ``degenerate``.
    """
    if len(matrix) != 2:
        raise InputError("verdicts are defined for 2x2 matrices")
    m = [[Fraction(x) for x in row] for row in matrix]
    tr = m[0][0] + m[1][1]
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    disc = tr * tr - 4 * det
    if disc < 0:
        s = math.sqrt(-float(disc)) / 2
        eig = (complex(float(tr) / 2, s), complex(float(tr) / 2, -s))
        return StabilityVerdict(subject, eig, None, None, False, "degenerate")
    s = math.sqrt(float(disc))
    first = (float(tr) + math.copysign(s, float(tr))) / 2
    second = float(det) / first if first != 0 else 0.0
    big, small = max(first, second), min(first, second)
    if abs(big - small) <= TIE_TOL * max(1.0, abs(big)) or small <= 0:
        return StabilityVerdict(subject, (big, small), None, None, False, "degenerate")
    pv, mv = _eigvec(m, big), _eigvec(m, small)
    if _locate(sector, pv):
        return StabilityVerdict(subject, (big, small), pv, mv, True, "attracting")
    if _locate(sector, mv):
        return StabilityVerdict(subject, (big, small), pv, mv, True, "repelling")
    target = "boundary"
    for name, sib in (siblings or {}).items():
        if _locate(sib, pv):
            target = name
            break
    return StabilityVerdict(subject, (big, small), pv, mv, False, "escapes-sector", target)

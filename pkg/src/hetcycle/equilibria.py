"""Equilibria of the cube replicator field, their spectra, and bifurcations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import game as gm
from .errors import ConvergenceError, InputError, NoSignChangeError
from .numerics import bisect, eigenvalues, newton, solve_exact

__all__ = [
    "HYPERBOLIC_TOL",
    "EquilibriumRecord",
    "BifurcationEvent",
    "NonResonance",
    "classify",
    "jacobian",
    "vertex_spectrum",
    "face_equilibria",
    "interior_equilibrium",
    "all_equilibria",
    "collinearity_residual",
    "find_hopf",
    "find_transcritical",
    "hopf_functional",
    "transcritical_functional",
    "check_nonresonance",
    "resonant_parameters",
]

HYPERBOLIC_TOL = 1e-8
IMAG_TOL = 1e-10


@dataclass(frozen=True)
class EquilibriumRecord:
    """An equilibrium with its Jacobian spectrum.

    ``eigen_directions`` is only filled for vertices: it maps the face that
    contains the vertex and is orthogonal to coordinate ``i`` to the exact
    eigenvalue along ``i``.
    """

    name: str
    kind: str
    location: tuple
    eigenvalues: tuple
    classification: str
    exact_location: tuple | None = None
    face: int | None = None
    vertex: int | None = None
    eigen_directions: dict = field(default_factory=dict, compare=False)

    @property
    def is_hyperbolic(self) -> bool:
        return self.classification != "non-hyperbolic"


@dataclass(frozen=True)
class BifurcationEvent:
    mu_star: float
    kind: str
    subject: str
    bracket: tuple
    residual: float


@dataclass(frozen=True)
class NonResonance:
    passed: bool
    witnesses: tuple


def classify(eigs, tol: float = HYPERBOLIC_TOL) -> str:
    """Sign-count classification of a spectrum.

    ``saddle-focus(s,u)`` has ``s`` eigenvalues with negative and ``u`` with
    positive real part, at least one pair being complex.
    """
    eigs = [complex(e) for e in eigs]
    if any(abs(e.real) <= tol for e in eigs):
        return "non-hyperbolic"
    neg = sum(e.real < 0 for e in eigs)
    pos = len(eigs) - neg
    if pos == 0:
        return "sink"
    if neg == 0:
        return "source"
    if any(abs(e.imag) > IMAG_TOL for e in eigs):
        return f"saddle-focus({neg},{pos})"
    return "saddle"


def jacobian(game: gm.PolymatrixGame, p, exact: bool = False):
    """Analytic Jacobian ``J_ik = d_ik (1 - 2 p_i) g_i + p_i (1 - p_i) A_ik``."""
    n = game.n_groups
    if len(p) != n:
        raise InputError(f"expected {n} cube coordinates, got {len(p)}")
    if exact:
        c, a = game.affine
        p = [gm.as_rational(v) for v in p]
        g = [c[i] + sum((a[i][j] * p[j] for j in range(n)), Fraction(0)) for i in range(n)]
        return tuple(
            tuple(
                (1 - 2 * p[i]) * g[i] * (i == k) + p[i] * (1 - p[i]) * a[i][k]
                for k in range(n)
            )
            for i in range(n)
        )
    c, a = game.affine_float
    p = np.asarray(p, dtype=float)
    g = c + a @ p
    return np.diag((1 - 2 * p) * g) + (p * (1 - p))[:, None] * a


def _g_exact(game, p):
    c, a = game.affine
    n = len(p)
    return [c[i] + sum((a[i][j] * p[j] for j in range(n)), Fraction(0)) for i in range(n)]


def _record(game, name, kind, exact, face=None):
    loc = tuple(float(v) for v in exact)
    eigs = tuple(eigenvalues(jacobian(game, loc)))
    return EquilibriumRecord(
        name=name, kind=kind, location=loc, eigenvalues=eigs,
        classification=classify(eigs), exact_location=tuple(exact), face=face,
    )


def vertex_spectrum(game: gm.PolymatrixGame) -> list:
    """All ``2^n`` vertices with exact eigenvalues.

    The Jacobian at a vertex is diagonal with entry ``(1 - 2 v_i) g_i(v)``.
    """
    n = game.n_groups
    out = []
    for k in range(1, 2 ** n + 1):
        v = gm.vertex_coords(k, n)
        g = _g_exact(game, [Fraction(x) for x in v])
        lam = [(1 - 2 * v[i]) * g[i] for i in range(n)]
        directions = {gm.face_of(i, v[i]): lam[i] for i in range(n)}
        eigs = tuple(sorted((complex(float(x)) for x in lam), key=lambda z: -z.real))
        out.append(EquilibriumRecord(
            name=f"v{k}", kind="vertex", location=tuple(float(x) for x in v),
            eigenvalues=eigs, classification=classify(eigs),
            exact_location=tuple(Fraction(x) for x in v), vertex=k,
            eigen_directions=directions,
        ))
    return out


def _newton_points(game, fixed: dict, grid: int) -> list:
    """Newton multistart on the field restricted to the free coordinates."""
    n = game.n_groups
    free = [i for i in range(n) if i not in fixed]

    def embed(y):
        p = np.empty(n)
        for i, v in fixed.items():
            p[i] = v
        p[free] = y
        return p

    def fun(y):
        return gm.field_cube(game, embed(y))[free]

    def jac(y):
        return jacobian(game, embed(y))[np.ix_(free, free)]

    ticks = (np.arange(grid) + 0.5) / grid
    found = []
    for start in itertools.product(ticks, repeat=len(free)):
        try:
            y = newton(fun, jac, np.array(start))
        except ConvergenceError:
            continue
        if np.all(y > 1e-9) and np.all(y < 1 - 1e-9):
            if not any(np.max(np.abs(y - z)) < 1e-8 for z in found):
                found.append(y)
    return [tuple(embed(y)) for y in found]


def _solve_on(game, fixed: dict):
    """Exact zero of ``g`` on the free coordinates, or None if singular."""
    n = game.n_groups
    c, a = game.affine
    free = [i for i in range(n) if i not in fixed]
    rows = [[a[i][j] for j in free] for i in free]
    rhs = [-(c[i] + sum((a[i][j] * fixed[j] for j in fixed), Fraction(0))) for i in free]
    sol = solve_exact(rows, rhs)
    if sol is None:
        return None
    p = [Fraction(0)] * n
    for i, v in fixed.items():
        p[i] = Fraction(v)
    for i, v in zip(free, sol):
        p[i] = v
    return tuple(p)


def face_equilibria(game: gm.PolymatrixGame, grid: int = 9) -> list:
    """Equilibria in the relative interior of each facet.

    ``g`` is affine, so the zero on a facet is found exactly; a singular
    facet system falls back to Newton multistart on a ``grid`` lattice.
    Records are named ``B1, B2, ...`` by increasing face index.
    """
    n = game.n_groups
    found = []
    for face in range(1, 2 * n + 1):
        coord = (face - 1) // 2
        value = 1 if face % 2 else 0
        fixed = {coord: Fraction(value)}
        sol = _solve_on(game, fixed)
        if sol is not None:
            if all(0 < sol[i] < 1 for i in range(n) if i != coord):
                found.append((face, sol))
        else:
            for pt in _newton_points(game, {coord: float(value)}, grid):
                found.append((face, tuple(Fraction(v) for v in pt)))
    return [
        _record(game, f"B{k}", "face-interior", loc, face=face)
        for k, (face, loc) in enumerate(found, start=1)
    ]


def interior_equilibrium(game: gm.PolymatrixGame, grid: int = 5):
    """The interior equilibrium, or None when the open cube has none."""
    sol = _solve_on(game, {})
    if sol is not None:
        if all(0 < v < 1 for v in sol):
            return _record(game, "O", "interior", sol)
        return None
    pts = _newton_points(game, {}, grid)
    if not pts:
        return None
    return _record(game, "O", "interior", tuple(Fraction(v) for v in pts[0]))


def all_equilibria(game: gm.PolymatrixGame) -> list:
    out = vertex_spectrum(game) + face_equilibria(game)
    inner = interior_equilibrium(game)
    if inner is not None:
        out.append(inner)
    return out


def collinearity_residual(mu):
    """Distance from the interior equilibrium to the segment between the two facet equilibria.

    Returns ``(residual, k)`` where ``O = B1 + k (B2 - B1)``; ``k`` is exact
    when ``mu`` is rational.
    """
    g = gm.build_mu_family(mu)
    faces = face_equilibria(g)
    inner = interior_equilibrium(g)
    if len(faces) != 2 or inner is None:
        raise InputError("collinearity needs two facet equilibria and an interior one")
    b1, b2, o = (np.array(r.exact_location) for r in (faces[0], faces[1], inner))
    d = b2 - b1
    k = sum(((o - b1) * d).tolist(), Fraction(0)) / sum((d * d).tolist(), Fraction(0))
    kf = min(max(float(k), 0.0), 1.0)
    proj = b1.astype(float) + kf * d.astype(float)
    residual = float(np.linalg.norm(o.astype(float) - proj))
    return residual, k


def hopf_functional(family: Callable, mu: float):
    """``(alpha, beta)`` of the complex pair at the interior equilibrium, or None."""
    rec = interior_equilibrium(family(gm.as_rational(mu)))
    if rec is None:
        return None
    pair = [e for e in rec.eigenvalues if abs(e.imag) > IMAG_TOL]
    if not pair:
        return None
    top = max(pair, key=lambda e: e.imag)
    return top.real, top.imag


def find_hopf(family: Callable = gm.build_mu_family, bracket=(104.5, 105.5),
              alpha_tol: float = 1e-10) -> BifurcationEvent:
    """Locate the parameter where the complex pair of the interior equilibrium
    crosses the imaginary axis."""
    def alpha(m):
        ab = hopf_functional(family, m)
        if ab is None:
            raise NoSignChangeError(f"no complex pair at mu={m}")
        return ab[0]

    res = bisect(alpha, float(bracket[0]), float(bracket[1]), xtol=1e-13, ftol=alpha_tol)
    h = 1e-4
    slope = (alpha(res.x + h) - alpha(res.x - h)) / (2 * h)
    beta = hopf_functional(family, res.x)[1]
    if slope == 0 or beta <= 0:
        raise NoSignChangeError("Hopf crossing is not transversal")
    lo, hi = res.lo, res.hi
    if not lo < res.x < hi:
        lo, hi = res.x - 1e-13, res.x + 1e-13
    return BifurcationEvent(res.x, "hopf", "O", (lo, hi), abs(res.fx))


def transcritical_functional(family: Callable, mu: float, name: str = "B1") -> float:
    """Largest real part among the face-tangent eigenvalues of a facet equilibrium."""
    game = family(gm.as_rational(mu))
    rec = next((r for r in face_equilibria(game) if r.name == name), None)
    if rec is None:
        raise InputError(f"no facet equilibrium named {name} at mu={mu}")
    coord = (rec.face - 1) // 2
    free = [i for i in range(game.n_groups) if i != coord]
    block = jacobian(game, rec.location)[np.ix_(free, free)]
    return float(max(np.linalg.eigvals(block).real))


def find_transcritical(family: Callable = gm.build_mu_family, bracket=(101.0, 103.0),
                       name: str = "B1", tol: float = 1e-10) -> BifurcationEvent:
    res = bisect(lambda m: transcritical_functional(family, m, name),
                 float(bracket[0]), float(bracket[1]), xtol=1e-12, ftol=tol)
    lo, hi = res.lo, res.hi
    if not lo < res.x < hi:
        lo, hi = res.x - 1e-12, res.x + 1e-12
    return BifurcationEvent(res.x, "transcritical", name, (lo, hi), abs(res.fx))


def check_nonresonance(record, tol: float = 1e-9) -> NonResonance:
    """Check ``|Re l_i - Re l_j - Re l_k| > tol`` for all ``i`` and ``j <= k``.

    Accepts a record or a plain sequence of eigenvalues.
    """
    eigs = record.eigenvalues if isinstance(record, EquilibriumRecord) else record
    re = [complex(e).real for e in eigs]
    bad = []
    for i in range(len(re)):
        for j in range(len(re)):
            for k in range(j, len(re)):
                if i in (j, k):
                    continue
                if abs(re[i] - re[j] - re[k]) <= tol:
                    bad.append((i, j, k))
    return NonResonance(not bad, tuple(bad))


def resonant_parameters(family: Callable = gm.build_mu_family, lo=None, hi=None) -> list:
    """Exact parameters where a vertex spectrum becomes resonant.

    Vertex eigenvalues are affine in the parameter for families whose payoff
    is affine in it (checked at a third sample).  Returns sorted
    ``(mu, vertex, (i, j, k))`` with eigen-indices in coordinate order.
    """
    m0, m1, m2 = Fraction(0), Fraction(1), Fraction(7, 3)
    s0, s1, s2 = (vertex_spectrum(family(m)) for m in (m0, m1, m2))
    out = []
    for r0, r1, r2 in zip(s0, s1, s2):
        lam0 = [r0.eigen_directions[f] for f in sorted(r0.eigen_directions)]
        lam1 = [r1.eigen_directions[f] for f in sorted(r1.eigen_directions)]
        lam2 = [r2.eigen_directions[f] for f in sorted(r2.eigen_directions)]
        slopes = [b - a for a, b in zip(lam0, lam1)]
        if any(a + s * m2 != c for a, s, c in zip(lam0, slopes, lam2)):
            raise InputError("vertex eigenvalues are not affine in the parameter")
        n = len(lam0)
        for i in range(n):
            for j in range(n):
                for k in range(j, n):
                    if i in (j, k):
                        continue
                    off = lam0[i] - lam0[j] - lam0[k]
                    slope = slopes[i] - slopes[j] - slopes[k]
                    if slope == 0:
                        continue
                    mu = -off / slope
                    if (lo is None or mu >= lo) and (hi is None or mu <= hi):
                        out.append((mu, r0.vertex, (i, j, k)))
    out.sort()
    return out

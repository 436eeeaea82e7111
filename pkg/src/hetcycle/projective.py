"""One-dimensional piecewise-Möbius projective map and regime classification.

Each S-edge ``k`` (in ascending edge order) occupies ``[k, k + 1]`` of the
line; a point ``x`` in it stands for the dual ray ``(x - k, 1 - (x - k))``
in the edge's two active coordinates.  The integers are fixed points.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import game as gm
from .equilibria import (
    BifurcationEvent,
    classify,
    face_equilibria,
    find_hopf,
    find_transcritical,
    interior_equilibrium,
    vertex_spectrum,
)
from .errors import InputError, NoSignChangeError
from .numerics import bisect_predicate
from .skeleton import Skeleton, build_skeleton, cycle_matrix, eigen_verdict

__all__ = [
    "Mobius",
    "ProjectiveBranch",
    "ProjectiveMap",
    "ProjectivePoint",
    "RegimeRecord",
    "NEUTRAL_TOL",
    "REGIME_TABLE",
    "build_projective_map",
    "evaluate",
    "derivative",
    "fixed_points",
    "periodic_points",
    "classify_regime",
    "regime_signature",
    "detect_thresholds",
]

NEUTRAL_TOL = 1e-9
ORBIT_TOL = 1e-10
EDGE_TOL = 1e-12
SCAN_JITTER = 1e-12

# Table of regimes for the built-in family: (likely limit set, glue cycle) -> case.
REGIME_TABLE = {
    (("H6",), "H6"): "a",
    (("H1", "H6"), "H2"): "b",
    (("H1", "H6"), "H4"): "c",
    (("H1", "H6"), "H5"): "d",
    (("B1", "B2"), "H5"): "e",
}


@dataclass(frozen=True)
class Mobius:
    """``x -> (a x + b) / (c x + d)``."""

    a: object
    b: object
    c: object
    d: object

    def __call__(self, x):
        return (self.a * x + self.b) / (self.c * x + self.d)

    def derivative(self, x):
        return (self.a * self.d - self.b * self.c) / (self.c * x + self.d) ** 2

    def after(self, other: "Mobius") -> "Mobius":
        """``self o other``."""
        return Mobius(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def shifted(self, src: int, dst: int) -> "Mobius":
        """Conjugate local ``[0,1] -> [0,1]`` map to global ``[src, src+1] -> [dst, dst+1]``."""
        a, b, c, d = self.a, self.b, self.c, self.d
        return Mobius(
            a + dst * c,
            b - a * src + dst * (d - c * src),
            c,
            d - c * src,
        )

    def fixed_points(self) -> list:
        """Real roots of ``c x^2 + (d - a) x - b = 0``, ascending.

        Exact Fractions when the coefficients are rational and the
        discriminant is a rational square, floats otherwise.
        """
        qa, qb, qc = self.c, self.d - self.a, -self.b
        if qa == 0:
            if qb == 0:
                return []
            return [-qc / qb]
        disc = qb * qb - 4 * qa * qc
        if disc < 0:
            return []
        root = _rational_sqrt(disc)
        if root is not None:
            return sorted({(-qb + root) / (2 * qa), (-qb - root) / (2 * qa)})
        s = math.sqrt(disc)
        fb = float(qb)
        q = -0.5 * (fb + math.copysign(s, fb))
        return sorted({q / float(qa), float(qc) / q})

    def coefficients(self) -> tuple:
        return (self.a, self.b, self.c, self.d)


def _rational_sqrt(v):
    if not isinstance(v, (int, Fraction)):
        return None
    v = Fraction(v)
    n, d = math.isqrt(v.numerator), math.isqrt(v.denominator)
    if n * n == v.numerator and d * d == v.denominator:
        return Fraction(n, d)
    return None


@dataclass(frozen=True)
class ProjectiveBranch:
    branch_id: int
    source: int
    target: int
    lo: Fraction
    hi: Fraction
    lo_closed: bool
    hi_closed: bool
    mobius: Mobius
    local: Mobius

    @property
    def label(self) -> str:
        return f"J{self.branch_id}"

    def __contains__(self, x) -> bool:
        return self.lo < x < self.hi


@dataclass(frozen=True)
class ProjectiveMap:
    mu: Fraction | None
    s_edges: tuple
    branches: tuple
    skeleton: Skeleton = field(repr=False, compare=False)

    @property
    def length(self) -> int:
        return len(self.s_edges)

    @property
    def breakpoints(self) -> list:
        pts = set()
        for b in self.branches:
            pts.update((b.lo, b.hi))
        return sorted(pts)

    def branch(self, ident) -> ProjectiveBranch:
        if isinstance(ident, str):
            ident = int(ident.lstrip("Jxi"))
        return next(b for b in self.branches if b.branch_id == ident)

    def locate(self, x):
        """Branch whose open interval holds ``x``; None for integer boundary points."""
        if x < 0 or x > self.length:
            raise InputError(f"x={x} outside [0, {self.length}]")
        exact = isinstance(x, (int, Fraction))
        if (x == int(x)) if exact else float(x).is_integer():
            return None
        for b in self.branches:
            if b.lo < x < b.hi:
                return b
        raise InputError(f"x={x} is a breakpoint of the projective map")


@dataclass(frozen=True)
class ProjectivePoint:
    x: float
    period: int
    itinerary: tuple
    orbit: tuple
    multiplier: float
    verdict: str
    cycle: str | None = None


def build_projective_map(skel: Skeleton | gm.PolymatrixGame, S=None) -> ProjectiveMap:
    """Sector intervals and Möbius branches for every S-branch.

    Branches whose sector misses the open simplex are dropped.
    """
    if isinstance(skel, gm.PolymatrixGame):
        skel = build_skeleton(skel, S)
    pos = {e: k for k, e in enumerate(skel.S)}
    out = []
    for br in skel.branches:
        lo, hi, _, _ = br.sector.interval()
        if lo >= hi:
            continue
        (m11, m12), (m21, m22) = br.matrix
        local = Mobius(m11 - m12, m12, m11 - m12 + m21 - m22, m12 + m22)
        src, dst = pos[br.source], pos[br.target]
        out.append(ProjectiveBranch(
            br.id, src, dst, lo + src, hi + src, lo == 0, hi == 1,
            local.shifted(src, dst), local,
        ))
    out.sort(key=lambda b: b.lo)
    return ProjectiveMap(skel.game.mu, skel.S, tuple(out), skel)


def evaluate(pm: ProjectiveMap, x):
    """``(phi(x), branch id)``; integers map to themselves with id None."""
    b = pm.locate(x)
    if b is None:
        return x, None
    return b.mobius(x), b.branch_id


def derivative(pm: ProjectiveMap, x):
    b = pm.locate(x)
    if b is None:
        raise InputError("derivative is not defined at boundary points")
    return b.mobius.derivative(x)


def _verdict(mult: float) -> str:
    if abs(mult - 1.0) <= NEUTRAL_TOL:
        return "neutral"
    return "attracting" if mult < 1.0 else "repelling"


def _primitive(word) -> bool:
    p = len(word)
    return all(word != word[k:] + word[:k] for k in range(1, p) if p % k == 0)


def _points_for_words(pm: ProjectiveMap, words) -> list:
    names = pm.skeleton.graph.cycle_names()
    out = []
    for word in words:
        brs = [pm.branches[i] for i in word]
        comp = brs[0].mobius
        for b in brs[1:]:
            comp = b.mobius.after(comp)
        for x0 in comp.fixed_points():
            lo, hi = brs[0].lo, brs[0].hi
            if not lo < x0 < hi or min(abs(x0 - lo), abs(x0 - hi)) <= EDGE_TOL:
                continue
            x0 = float(x0)
            orbit, x, mult, ok = [], x0, 1.0, True
            for b in brs:
                if not float(b.lo) < x < float(b.hi):
                    ok = False
                    break
                orbit.append(x)
                mult *= abs(float(b.mobius.derivative(x)))
                x = float(b.mobius(x))
            if not ok or abs(x - x0) > ORBIT_TOL * max(1.0, abs(x0)):
                continue
            ids = tuple(b.branch_id for b in brs)
            cyc = names.get(pm.skeleton.cycle_of(ids))
            out.append(ProjectivePoint(x0, len(word), ids, tuple(orbit), mult, _verdict(mult), cyc))
    return out


def fixed_points(pm: ProjectiveMap) -> list:
    """Interior fixed points, one per branch mapping its edge to itself."""
    words = [(i,) for i, b in enumerate(pm.branches) if b.source == b.target]
    return _points_for_words(pm, words)


def periodic_points(pm: ProjectiveMap, max_period: int = 4) -> list:
    """Periodic orbits of minimal period up to ``max_period``.

    Itineraries follow the source/target edge table; each orbit is reported
    once, at the rotation whose branch positions are smallest.
    """
    if max_period < 1:
        raise InputError("max_period must be at least 1")
    n = len(pm.branches)
    succ = {i: [j for j in range(n) if pm.branches[j].source == pm.branches[i].target]
            for i in range(n)}
    words = []
    for p in range(1, max_period + 1):
        for word in itertools.product(range(n), repeat=p):
            if word != min(word[k:] + word[:k] for k in range(p)):
                continue
            if not _primitive(word):
                continue
            if all(word[(k + 1) % p] in succ[word[k]] for k in range(p)):
                words.append(word)
    return _points_for_words(pm, words)


@dataclass(frozen=True)
class RegimeRecord:
    mu: Fraction | None
    case: str | None
    points: tuple
    verdicts: dict
    attracting_cycles: tuple
    repelling_cycles: tuple
    likely_limit_set: tuple
    glue_cycle: str | None
    indeterminate: bool = False
    reason: str = ""
    bracket: tuple | None = None

    @property
    def table_row(self) -> dict:
        return {
            "case": self.case,
            "likely_limit_set": " U ".join(self.likely_limit_set),
            "glue_cycle": self.glue_cycle,
        }


def cycle_verdicts(skel: Skeleton) -> dict:
    """Perron verdict per named cycle, taken at its smallest S-edge."""
    out = {}
    names = skel.graph.cycle_names()
    for cyc, name in names.items():
        ids = skel.decompose(cyc)
        mat, sector = cycle_matrix(skel, ids)
        base = skel.branch(ids[0]).source
        siblings = {f"xi{b.id}": b.sector for b in skel.branches_from(base)}
        out[name] = eigen_verdict(mat, sector, name, siblings)
    return out


def classify_regime(game_or_mu, S=None, max_period: int = 4) -> RegimeRecord:
    """Inventory of the projective map plus the equilibrium picture.

    The likely limit set is the set of facet sinks when there are any,
    otherwise the cycles carried by attracting periodic points.  The glue
    cycle is the unique cycle carried by a repelling point; with none, the
    unique attracting cycle.
    """
    game = game_or_mu if isinstance(game_or_mu, gm.PolymatrixGame) else gm.build_mu_family(game_or_mu)
    skel = build_skeleton(game, S)
    pm = build_projective_map(skel)
    pts = periodic_points(pm, max_period)
    verdicts = cycle_verdicts(skel)
    reasons = []
    faces = face_equilibria(game)
    if any(r.classification == "non-hyperbolic" for r in faces + vertex_spectrum(game)):
        reasons.append("non-hyperbolic equilibrium")
    if any(p.verdict == "neutral" for p in pts):
        reasons.append("neutral periodic point")
    bps = [float(b) for b in pm.breakpoints]
    if any(min(abs(x - b) for b in bps) <= NEUTRAL_TOL for p in pts for x in p.orbit):
        reasons.append("periodic orbit on a breakpoint")
    attracting = tuple(sorted({p.cycle for p in pts if p.verdict == "attracting" and p.cycle},
                              key=_name_key))
    repelling = tuple(sorted({p.cycle for p in pts if p.verdict == "repelling" and p.cycle},
                             key=_name_key))
    sinks = tuple(r.name for r in faces if r.classification == "sink")
    likely = sinks if sinks else attracting
    if len(repelling) == 1:
        glue = repelling[0]
    elif not repelling and len(attracting) == 1:
        glue = attracting[0]
    else:
        glue = None
        reasons.append("glue cycle not unique")
    case = REGIME_TABLE.get((likely, glue))
    indeterminate = bool(reasons)
    bracket = None
    if indeterminate and game.mu is not None:
        m = float(game.mu)
        bracket = (m - 1e-6, m + 1e-6)
    return RegimeRecord(
        game.mu, None if indeterminate else case, tuple(pts), verdicts, attracting, repelling,
        likely, glue, indeterminate, "; ".join(reasons), bracket,
    )


def _name_key(name):
    return (name[0], int(name[1:]) if name[1:].isdigit() else 0)


def _inertia(rec) -> tuple:
    if rec is None:
        return None
    return (sum(e.real < 0 for e in rec.eigenvalues), sum(e.real > 0 for e in rec.eigenvalues),
            classify(rec.eigenvalues) == "non-hyperbolic")


def regime_signature(mu, family=gm.build_mu_family, max_period: int = 2) -> tuple:
    """Discrete fingerprint that is locally constant away from bifurcations.

    Parts: facet-equilibrium inertia, interior inertia, and the projective
    inventory (itinerary, verdict) of periodic points.
    """
    game = family(gm.as_rational(mu))
    faces = tuple(_inertia(r) for r in face_equilibria(game))
    inner = _inertia(interior_equilibrium(game))
    try:
        pm = build_projective_map(build_skeleton(game))
        proj = tuple(sorted((p.itinerary, p.verdict) for p in periodic_points(pm, max_period)))
    except Exception as exc:  # noqa: BLE001 - a failing reduction is itself a state
        proj = ("error", type(exc).__name__)
    return faces, inner, proj


def detect_thresholds(lo, hi, steps: int = 500, family=gm.build_mu_family,
                      xtol: float = 1e-10, merge: float = 1e-6, max_period: int = 2) -> list:
    """Scan ``[lo, hi]`` for changes of :func:`regime_signature` and refine them.

    A change in the facet part is reported as transcritical, in the interior
    part as hopf, otherwise as sector-crossing.  Events closer than
    ``merge`` collapse into one, keeping the equilibrium event.  Events
    within ``merge`` of either end of the range are dropped.
    """
    lo, hi = float(lo), float(hi)
    if not hi > lo:
        raise InputError("empty parameter range")
    if steps < 2:
        raise InputError("steps must be at least 2")
    # Nudge samples off exact rational parameters, where the family degenerates.
    grid = [lo + (hi - lo) * k / steps + SCAN_JITTER for k in range(steps)]
    grid.append(hi - SCAN_JITTER)

    def sig(m):
        return regime_signature(m, family, max_period)

    sigs = [sig(m) for m in grid]
    raw = []
    for (a, sa), (b, sb) in zip(zip(grid, sigs), zip(grid[1:], sigs[1:])):
        if sa == sb:
            continue
        l, h = bisect_predicate(sig, a, b, xtol=xtol)
        sl, sh = sig(l), sig(h)
        if sl[0] != sh[0]:
            kind = "transcritical"
        elif sl[1] != sh[1]:
            kind = "hopf"
        else:
            kind = "sector-crossing"
        raw.append((l, h, kind))
    events = []
    for l, h, kind in raw:
        if events and l - events[-1][1] <= merge:
            pl, ph, pk = events[-1]
            keep = kind if _rank(kind) < _rank(pk) else pk
            events[-1] = (pl, h, keep)
        else:
            events.append((l, h, kind))
    out = []
    for l, h, kind in events:
        ev = _refine(l, h, kind, family)
        # Degeneracies sitting on the range ends are not crossings inside it.
        if min(ev.mu_star - lo, hi - ev.mu_star) > merge:
            out.append(ev)
    return out


def _rank(kind):
    return {"transcritical": 0, "hopf": 1, "sector-crossing": 2}[kind]


def _refine(l, h, kind, family) -> BifurcationEvent:
    pad = 1e-6
    if kind == "transcritical":
        try:
            return find_transcritical(family, (l - pad, h + pad))
        except NoSignChangeError:
            pass
    if kind == "hopf":
        try:
            return find_hopf(family, (l - pad, h + pad))
        except NoSignChangeError:
            pass
    mid = 0.5 * (l + h)
    return BifurcationEvent(mid, kind, "projective", (l, h), h - l)

"""Trajectories of the cube field, vertex itineraries and dwell-time growth.

Integration runs in logit coordinates ``y_i = log(p_i / (1 - p_i))``, where
the field becomes ``dy/dt = c + A sigma(y)``.  Faces sit at infinity, so
trajectories cannot leave the cube and long dwells near saddles cost few
steps.  The step loop lives in a compiled kernel with a pure-Python twin.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import game as gm
from .errors import InputError, InsufficientDataError

if os.environ.get("HETCYCLE_PURE"):
    from . import _kernels_py as _kernels
else:
    try:
        from . import _kernels
    except ImportError:  # extension not built
        from . import _kernels_py as _kernels

KERNEL = _kernels.NAME

__all__ = [
    "KERNEL",
    "Trajectory",
    "Visit",
    "Itinerary",
    "GrowthEstimate",
    "SeedOutcome",
    "CrossValidation",
    "integrate",
    "extract_itinerary",
    "terminal_cycle",
    "transition_growth",
    "halton_seeds",
    "cross_validate",
    "thread_count",
    "trajectory_csv",
    "itinerary_csv",
]

TIME_EXHAUSTED = "time-exhausted"
CONVERGED = "converged-to-point"
LOCKED = "boundary-locked"

HMIN = 1e-14
CHUNK = 1024


def _sigmoid(y):
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    pos = y >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-y[pos]))
    e = np.exp(y[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _logit(p: float) -> float:
    if p <= 0.0:
        return -math.inf
    if p >= 1.0:
        return math.inf
    return math.log(p) - math.log1p(-p)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Accepted integrator steps in logit coordinates.

    ``y`` and ``f`` hold state and velocity per sample; coordinates that
    started on a face are ``+-inf`` with zero velocity.
    """

    t: np.ndarray
    y: np.ndarray
    f: np.ndarray
    accepted: int
    rejected: int
    termination: str

    @property
    def points(self) -> np.ndarray:
        """Samples as cube points."""
        return _sigmoid(self.y)

    @property
    def terminal(self) -> np.ndarray:
        return _sigmoid(self.y[-1])

    def logit_at(self, when: float) -> np.ndarray:
        """Cubic Hermite interpolant of the logit state."""
        t = self.t
        if not t[0] <= when <= t[-1]:
            raise InputError(f"time {when} outside [{t[0]}, {t[-1]}]")
        k = int(np.searchsorted(t, when, side="right")) - 1
        k = min(k, len(t) - 2)
        if k < 0:
            return self.y[0].copy()
        return _hermite(t[k], t[k + 1], self.y[k], self.y[k + 1],
                        self.f[k], self.f[k + 1], when)

    def at(self, when: float) -> np.ndarray:
        return _sigmoid(self.logit_at(when))


def _hermite(t0, t1, y0, y1, f0, f1, when):
    h = t1 - t0
    s = (when - t0) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    out = np.where(np.isfinite(y0), 0.0, y0)
    fin = np.isfinite(y0)
    out[fin] = (h00 * y0[fin] + h10 * h * f0[fin] + h01 * y1[fin] + h11 * h * f1[fin])
    return out


def _initial_step(fun, y, f, rtol, atol, t_span):
    # Standard two-probe estimate for an order-5 method.
    sc = atol + rtol * np.abs(y)
    d0 = np.sqrt(np.mean((y / sc) ** 2))
    d1 = np.sqrt(np.mean((f / sc) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, t_span)
    f1 = fun(y + h0 * f)
    d2 = np.sqrt(np.mean(((f1 - f) / sc) ** 2)) / h0
    big = max(d1, d2)
    h1 = max(1e-6, h0 * 1e-3) if big <= 1e-15 else (0.01 / big) ** (1 / 5)
    return min(100 * h0, h1, t_span)


def integrate(game: gm.PolymatrixGame, x0: Sequence, t_end: float, rel_tol: float = 1e-9,
              abs_tol: float = 1e-12, lock_eps: float = 0.05, lock_dwell: float = 1e3,
              conv_tol: float = 1e-6, max_steps: int = 2_000_000) -> Trajectory:
    """Integrate the cube field from ``x0`` up to time ``t_end``.

    Stops early when the cube velocity falls below ``conv_tol`` with every
    moving coordinate heading into its face (converged-to-point), when the
    orbit stays within ``lock_eps`` of one vertex for longer than
    ``lock_dwell`` or the step underflows (boundary-locked).  Hitting
    ``max_steps`` ends the run as time-exhausted.
    """
    n = game.n_groups
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (n,) or np.any(x0 < 0) or np.any(x0 > 1) or not np.all(np.isfinite(x0)):
        raise InputError(f"x0 must be a point of [0, 1]^{n}")
    if not t_end > 0:
        raise InputError("t_end must be positive")
    c, a = game.affine_float
    y0 = np.array([_logit(v) for v in x0])
    free = np.isfinite(y0)
    idx = np.flatnonzero(free)
    # Coordinates on a face stay there; fold them into the constant term.
    pinned = np.where(free, 0.0, x0)
    cr = np.ascontiguousarray(c[idx] + a[np.ix_(idx, ~free)] @ pinned[~free])
    ar = np.ascontiguousarray(a[np.ix_(idx, idx)])

    def full_f(yr):
        f = np.zeros(n)
        f[idx] = cr + ar @ _sigmoid(yr)
        return f

    def expand(yr_block):
        out = np.empty((len(yr_block), n))
        out[:, :] = y0
        out[:, idx] = yr_block
        return out

    f0 = full_f(y0[idx]) if idx.size else np.zeros(n)
    if idx.size == 0:
        return Trajectory(np.array([0.0, float(t_end)]), np.vstack([y0, y0]),
                          np.zeros((2, n)), 0, 0, CONVERGED)

    def fun(yr):
        return cr + ar @ _sigmoid(yr)

    ts, ys, fs = [np.array([0.0])], [y0[None, :]], [f0[None, :]]
    t, yr = 0.0, y0[idx].copy()
    h = _initial_step(fun, yr, f0[idx], rel_tol, abs_tol, t_end)
    err_old = 1e-4
    accepted = rejected = 0
    termination = TIME_EXHAUSTED
    lock_y = -_logit(lock_eps)
    tube_vertex, tube_since = _tube(y0, lock_y), 0.0
    out_t = np.empty(CHUNK)
    out_y = np.empty((CHUNK, idx.size))
    out_f = np.empty((CHUNK, idx.size))
    while t < t_end:
        count, t_new, h, err_old, acc, rej, status = _kernels.dopri_run(
            cr, ar, yr, t, float(t_end), h, err_old, rel_tol, abs_tol, HMIN,
            out_t, out_y, out_f,
        )
        accepted += acc
        rejected += rej
        block_t = out_t[:count].copy()
        block_y = expand(out_y[:count])
        block_f = np.zeros((count, n))
        block_f[:, idx] = out_f[:count]
        stop = None
        tubes = _tubes(block_y, lock_y)
        conv = _converged(block_y, block_f, conv_tol)
        for k in range(count):
            v = tubes[k]
            if v != tube_vertex:
                tube_vertex, tube_since = v, block_t[k]
            elif v and block_t[k] - tube_since > lock_dwell:
                stop = (k, LOCKED)
                break
            if conv[k]:
                stop = (k, CONVERGED)
                break
        if stop is not None:
            k, termination = stop
            ts.append(block_t[:k + 1])
            ys.append(block_y[:k + 1])
            fs.append(block_f[:k + 1])
            break
        ts.append(block_t)
        ys.append(block_y)
        fs.append(block_f)
        if count:
            t, yr = t_new, out_y[count - 1].copy()
        if status == _kernels.UNDERFLOW:
            termination = LOCKED
            break
        if accepted >= max_steps:
            break
    return Trajectory(np.concatenate(ts), np.vstack(ys), np.vstack(fs),
                      accepted, rejected, termination)


def _tubes(ys, bound):
    """Per row of ``ys``, the vertex whose ``bound``-tube in logit
    coordinates contains it, or 0."""
    ys = np.atleast_2d(ys)
    n = ys.shape[1]
    weights = 2 ** np.arange(n - 1, -1, -1)
    inside = np.all(np.abs(ys) > bound, axis=1)
    index = 1 + (ys > 0).astype(int) @ weights
    return np.where(inside, index, 0)


def _tube(y, bound) -> int:
    return int(_tubes(np.asarray(y)[None, :], bound)[0])


def _converged(ys, fs, tol):
    """Rows where the cube speed is below ``tol`` and every coordinate still
    moving in logit space runs into its own face."""
    p = _sigmoid(ys)
    slow = np.all(np.abs(p * (1 - p) * fs) < tol, axis=1)
    moving = np.abs(fs) > 1e-6
    outward = np.all(~moving | (np.sign(fs) == np.sign(ys)), axis=1)
    return slow & outward


@dataclass(frozen=True)
class Visit:
    vertex: int
    t_in: float
    t_out: float

    @property
    def dwell(self) -> float:
        return self.t_out - self.t_in


@dataclass(frozen=True)
class Itinerary:
    """Ordered vertex visits at sup-norm radius ``epsilon``.

    ``open_end`` marks a last visit cut short by the end of the trajectory;
    ``anomalies`` lists visit positions ``k`` where visit ``k + 1`` is not a
    graph successor of visit ``k``.
    """

    visits: tuple
    epsilon: float
    open_end: bool = False
    anomalies: tuple = ()

    @property
    def vertices(self) -> tuple:
        return tuple(v.vertex for v in self.visits)


def _hermite_scalar(traj, k, bound, vertex):
    """Membership test ``when -> in tube of vertex`` on step ``k``."""
    t0, t1 = float(traj.t[k]), float(traj.t[k + 1])
    y0, y1, f0, f1 = traj.y[k], traj.y[k + 1], traj.f[k], traj.f[k + 1]
    h = t1 - t0
    n = len(y0)
    bits = gm.vertex_coords(vertex, n)
    fin = [i for i in range(n) if math.isfinite(y0[i])]
    # Pinned coordinates sit on a face, so their part of the test is static.
    static = all((y0[i] > 0) == bool(bits[i]) for i in range(n) if i not in fin)

    def inside(when):
        if not static:
            return False
        s = (when - t0) / h
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        for i in fin:
            y = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i]
            if not (y > bound if bits[i] else y < -bound):
                return False
        return True

    return inside


def _edge(inside, lo, hi, inside_at_lo, iters=64):
    """Bisect for the time in ``[lo, hi]`` where ``inside`` flips."""
    for _ in range(iters):
        if hi - lo <= 1e-12 * max(1.0, abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if inside(mid) == inside_at_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


PROBES = (0.25, 0.5, 0.75)


def extract_itinerary(traj: Trajectory, eps: float = 0.05, graph=None) -> Itinerary:
    """Visits to the ``eps``-neighbourhoods of cube vertices.

    Entry and exit times are refined on the Hermite interpolant; steps that
    start and end outside every tube are probed at interior points so a
    fast pass is not missed.  A stationary orbit gives an empty itinerary.
    """
    if not 0 < eps < 0.5:
        raise InputError("eps must lie in (0, 0.5)")
    bound = -_logit(eps)
    if traj.termination == CONVERGED and np.all(np.isinf(traj.y[0])):
        return Itinerary((), eps)
    states = _tubes(traj.y, bound)
    probes = _probe_states(traj, states, bound)
    visits = []
    current, since = int(states[0]), float(traj.t[0])
    for k in range(len(states) - 1):
        a, b = int(states[k]), int(states[k + 1])
        t0, t1 = float(traj.t[k]), float(traj.t[k + 1])
        if a == b == 0 and k in probes:
            frac, v = probes[k]
            when = t0 + frac * (t1 - t0)
            inside = _hermite_scalar(traj, k, bound, v)
            visits.append(Visit(v, _edge(inside, t0, when, False), _edge(inside, when, t1, True)))
            continue
        if a == b:
            continue
        if a:
            visits.append(Visit(a, since, _edge(_hermite_scalar(traj, k, bound, a), t0, t1, True)))
        if b:
            since = _edge(_hermite_scalar(traj, k, bound, b), t0, t1, False)
        current = b
    end_open = bool(current)
    if current:
        visits.append(Visit(current, since, float(traj.t[-1])))
    anomalies = ()
    if graph is not None:
        anomalies = tuple(
            k for k in range(len(visits) - 1)
            if graph.edge_between(visits[k].vertex, visits[k + 1].vertex) is None
        )
    return Itinerary(tuple(visits), eps, end_open, anomalies)


def _probe_states(traj, states, bound) -> dict:
    """``{step: (fraction, vertex)}`` for outside-outside steps whose
    interpolant dips into a tube at a probe point."""
    ks = np.flatnonzero((states[:-1] == 0) & (states[1:] == 0))
    if ks.size == 0:
        return {}
    t0, t1 = traj.t[ks], traj.t[ks + 1]
    y0, y1, f0, f1 = traj.y[ks], traj.y[ks + 1], traj.f[ks], traj.f[ks + 1]
    fin = np.isfinite(y0)
    y0f, y1f = np.where(fin, y0, 0.0), np.where(fin, y1, 0.0)
    h = (t1 - t0)[:, None]
    hits = {}
    for s in PROBES:
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        y = h00 * y0f + h10 * h * f0 + h01 * y1f + h11 * h * f1
        y = np.where(fin, y, y0)
        found = _tubes(y, bound)
        for j in np.flatnonzero(found):
            hits.setdefault(int(ks[j]), (s, int(found[j])))
    return hits


def _period(seq) -> tuple:
    """Smallest period ``L >= 2`` of the tail and the length of the periodic tail."""
    n = len(seq)
    for L in range(2, n // 2 + 1):
        if len(set(seq[n - L:])) != L:
            continue
        k = n - L - 1
        while k >= 0 and seq[k] == seq[k + L]:
            k -= 1
        tail = n - k - 1
        if tail >= 2 * L:
            return L, tail
    return 0, 0


def terminal_cycle(itinerary: Itinerary, graph, repeats: int = 2):
    """Name of the graph cycle the itinerary ends on, repeated at least
    ``repeats`` times; None when the tail is not periodic."""
    seq = itinerary.vertices
    L, tail = _period(seq)
    if not L or tail < repeats * L:
        return None
    block = seq[len(seq) - L:]
    start = block.index(min(block))
    canon = tuple(block[start:] + block[:start])
    return graph.cycle_names().get(canon)


@dataclass(frozen=True)
class GrowthEstimate:
    """Per-cycle growth factor of dwell times along the terminal cycle."""

    ratio: float
    slope: float
    repetitions: int
    cycle: tuple


def transition_growth(itinerary: Itinerary, min_repetitions: int = 6) -> GrowthEstimate:
    """Least-squares growth of log dwell time along the periodic tail.

    The slope against repetition number is pooled over positions in the
    cycle, each position with its own intercept, so ``ratio`` is the factor
    by which dwell times grow per cycle.
    """
    visits = list(itinerary.visits)
    if itinerary.open_end and visits:
        visits.pop()
    seq = tuple(v.vertex for v in visits)
    L, tail = _period(seq)
    reps = tail // L if L else 0
    if reps < min_repetitions:
        raise InsufficientDataError(
            f"need {min_repetitions} complete cycle repetitions, found {reps}"
        )
    used = visits[len(visits) - reps * L:]
    dwell = np.array([v.dwell for v in used])
    if np.any(dwell <= 0):
        raise InsufficientDataError("nonpositive dwell time in periodic tail")
    logd = np.log(dwell).reshape(reps, L)
    r = np.arange(reps, dtype=float)
    rc = r - r.mean()
    dc = logd - logd.mean(axis=0)
    slope = float((rc[:, None] * dc).sum() / (L * (rc ** 2).sum()))
    block = seq[len(seq) - L:]
    return GrowthEstimate(math.exp(slope), slope, reps, tuple(block))


def halton_seeds(count: int, dim: int = 3, skip: int = 1) -> np.ndarray:
    """Unscrambled Halton points in the open cube, skipping the origin."""
    from scipy.stats import qmc

    if count < 1:
        raise InputError("count must be positive")
    sampler = qmc.Halton(d=dim, scramble=False)
    if skip:
        sampler.fast_forward(skip)
    return sampler.random(count)


def thread_count() -> int:
    """Worker threads for campaigns, capped by ``HETCYCLE_THREADS``."""
    n = os.cpu_count() or 1
    cap = os.environ.get("HETCYCLE_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError as exc:
            raise InputError(f"HETCYCLE_THREADS must be an integer, got {cap!r}") from exc
    return n


@dataclass(frozen=True)
class SeedOutcome:
    seed: tuple
    termination: str
    terminal: tuple
    label: str | None
    matches: bool
    growth: float | None = None


@dataclass(frozen=True)
class CrossValidation:
    mu: float
    case: str | None
    likely_limit_set: tuple
    outcomes: tuple
    counts: dict = field(default_factory=dict)

    @property
    def fraction(self) -> float:
        return sum(o.matches for o in self.outcomes) / len(self.outcomes)

    @property
    def observed_cycles(self) -> set:
        return {o.label for o in self.outcomes if o.label and o.label.startswith("H")}

    @property
    def mismatches(self) -> list:
        return [o for o in self.outcomes if not o.matches]


def _label_point(point, equilibria, tol):
    best, name = math.inf, None
    for rec in equilibria:
        d = float(np.max(np.abs(np.asarray(rec.location, dtype=float) - point)))
        if d < best:
            best, name = d, rec.name
    return name if best <= tol else None


def _run_seed(game, graph, equilibria, seed, eps, t_end, expected, point_tol):
    traj = integrate(game, seed, t_end)
    growth = None
    if traj.termination == CONVERGED:
        label = _label_point(traj.terminal, equilibria, point_tol)
    else:
        itin = extract_itinerary(traj, eps, graph)
        label = terminal_cycle(itin, graph)
        if label is not None and traj.termination == LOCKED:
            try:
                growth = transition_growth(itin).ratio
            except InsufficientDataError:
                growth = None
    return SeedOutcome(tuple(float(v) for v in seed), traj.termination,
                       tuple(float(v) for v in traj.terminal), label,
                       label in expected, growth)


def cross_validate(mu, seeds=None, eps: float = 0.05, t_end: float = 1e5,
                   family=gm.build_mu_family, threads: int | None = None,
                   point_tol: float = 1e-3) -> CrossValidation:
    """Integrate every seed and compare its fate with the predicted regime.

    A seed matches when it ends on a cycle, or converges to an equilibrium,
    that belongs to the likely limit set.  Seeds default to 50 Halton points.
    """
    from .equilibria import all_equilibria
    from .network import graph_for
    from .projective import classify_regime

    game = family(mu)
    regime = classify_regime(game)
    expected = set(regime.likely_limit_set)
    graph = graph_for(game)
    equilibria = all_equilibria(game)
    seeds = halton_seeds(50) if seeds is None else np.asarray(seeds, dtype=float)
    workers = threads or thread_count()

    def run(seed):
        return _run_seed(game, graph, equilibria, seed, eps, t_end, expected, point_tol)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = tuple(pool.map(run, seeds))
    else:
        outcomes = tuple(run(s) for s in seeds)
    counts = {}
    for o in outcomes:
        counts[o.label or "unclassified"] = counts.get(o.label or "unclassified", 0) + 1
    return CrossValidation(float(mu), regime.case, tuple(regime.likely_limit_set),
                           outcomes, counts)


def trajectory_csv(traj: Trajectory) -> str:
    """``t,x,y,z`` rows (one column per cube coordinate) with 17 significant digits."""
    n = traj.y.shape[1]
    names = ["x", "y", "z"] if n == 3 else [f"p{i + 1}" for i in range(n)]
    lines = [",".join(["t", *names])]
    for t, p in zip(traj.t, traj.points):
        lines.append(",".join(format(float(v), ".17g") for v in (t, *p)))
    return "\n".join(lines) + "\n"


def itinerary_csv(itinerary: Itinerary) -> str:
    lines = ["vertex,t_in,t_out"]
    for v in itinerary.visits:
        lines.append(f"v{v.vertex},{v.t_in:.17g},{v.t_out:.17g}")
    return "\n".join(lines) + "\n"

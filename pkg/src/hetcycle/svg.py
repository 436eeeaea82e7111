"""Deterministic SVG figures: the projective map, cobwebs and the cube graph.

Every figure is an 800x600 viewport; coordinates are printed with two
decimals so identical inputs give identical bytes.
"""

from __future__ import annotations

import math
from fractions import Fraction
from xml.sax.saxutils import escape

from .errors import InputError
from .projective import ProjectiveMap

__all__ = ["WIDTH", "HEIGHT", "projective_svg", "cobweb_svg", "cobweb_orbit", "graph_svg"]

WIDTH, HEIGHT = 800, 600
MARGIN = 60
SHADES = ("#e8f0fe", "#fdecea", "#e6f4ea", "#fef7e0", "#f3e8fd", "#e0f7fa")
SAMPLES = 200


def _f(x: float) -> str:
    return f"{x:.2f}"


class _Frame:
    """Maps ``[0, L]^2`` into the plotting box."""

    def __init__(self, length: float):
        self.length = float(length)
        self.size = min(WIDTH, HEIGHT) - 2 * MARGIN
        self.x0 = (WIDTH - self.size) / 2
        self.y0 = HEIGHT - MARGIN

    def px(self, x):
        return self.x0 + self.size * float(x) / self.length

    def py(self, y):
        return self.y0 - self.size * float(y) / self.length


def _head(title: str) -> list:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]


def _axes(fr: _Frame, pm: ProjectiveMap) -> list:
    out = []
    for b, shade in zip(sorted(pm.branches, key=lambda b: b.lo), _cycle(SHADES)):
        x1, x2 = fr.px(b.lo), fr.px(b.hi)
        out.append(f'<rect x="{_f(x1)}" y="{_f(fr.py(pm.length))}" width="{_f(x2 - x1)}" '
                   f'height="{_f(fr.size)}" fill="{shade}" stroke="none"/>')
        out.append(f'<text x="{_f((x1 + x2) / 2)}" y="{_f(fr.py(pm.length) - 8)}" '
                   f'font-size="12" text-anchor="middle">{b.label}</text>')
    out.append(f'<rect x="{_f(fr.x0)}" y="{_f(fr.py(pm.length))}" width="{_f(fr.size)}" '
               f'height="{_f(fr.size)}" fill="none" stroke="black"/>')
    for k in range(pm.length + 1):
        out.append(f'<text x="{_f(fr.px(k))}" y="{_f(fr.y0 + 18)}" font-size="12" '
                   f'text-anchor="middle">{k}</text>')
        out.append(f'<text x="{_f(fr.x0 - 10)}" y="{_f(fr.py(k) + 4)}" font-size="12" '
                   f'text-anchor="end">{k}</text>')
    out.append(f'<line x1="{_f(fr.px(0))}" y1="{_f(fr.py(0))}" x2="{_f(fr.px(pm.length))}" '
               f'y2="{_f(fr.py(pm.length))}" stroke="#888" stroke-dasharray="4 4"/>')
    return out


def _cycle(seq):
    while True:
        yield from seq


def _branch_paths(fr: _Frame, pm: ProjectiveMap) -> list:
    out = []
    for b in pm.branches:
        lo, hi = float(b.lo), float(b.hi)
        pts = []
        for k in range(SAMPLES + 1):
            x = lo + (hi - lo) * (k + 0.5) / (SAMPLES + 1)
            y = float(b.mobius(x))
            if not 0.0 <= y <= pm.length:
                continue
            pts.append(f"{_f(fr.px(x))},{_f(fr.py(y))}")
        if pts:
            out.append(f'<polyline points="{" ".join(pts)}" fill="none" stroke="#1a237e" '
                       f'stroke-width="1.5"/>')
    return out


def projective_svg(pm: ProjectiveMap, title: str | None = None) -> str:
    """Graph of the map over ``[0, #S]`` with its intervals shaded."""
    fr = _Frame(pm.length)
    title = title or _title(pm, "projective map")
    body = _head(title) + _axes(fr, pm) + _branch_paths(fr, pm)
    return "\n".join(body + ["</svg>"]) + "\n"


def cobweb_orbit(pm: ProjectiveMap, start: float, iterates: int = 100) -> list:
    """Orbit of ``start``; stops early on a boundary point or breakpoint."""
    x = float(start)
    if not 0 < x < pm.length:
        raise InputError(f"start must lie in (0, {pm.length})")
    orbit = [x]
    for _ in range(iterates):
        try:
            b = pm.locate(x)
        except InputError:
            break
        if b is None:
            break
        x = float(b.mobius(x))
        orbit.append(x)
    return orbit


def cobweb_svg(pm: ProjectiveMap, start: float, iterates: int = 100,
               title: str | None = None) -> str:
    """Projective map with the cobweb of ``iterates`` steps from ``start``."""
    orbit = cobweb_orbit(pm, start, iterates)
    fr = _Frame(pm.length)
    title = title or _title(pm, f"cobweb from {start}")
    body = _head(title) + _axes(fr, pm) + _branch_paths(fr, pm)
    pts = [f"{_f(fr.px(orbit[0]))},{_f(fr.py(0))}"]
    for a, b in zip(orbit, orbit[1:]):
        pts.append(f"{_f(fr.px(a))},{_f(fr.py(b))}")
        pts.append(f"{_f(fr.px(b))},{_f(fr.py(b))}")
    body.append(f'<polyline points="{" ".join(pts)}" fill="none" stroke="#c62828" '
                f'stroke-width="0.8"/>')
    body.append(f'<circle cx="{_f(fr.px(orbit[0]))}" cy="{_f(fr.py(0))}" r="4" fill="#1565c0"/>')
    body.append(f'<circle cx="{_f(fr.px(orbit[-1]))}" cy="{_f(fr.py(orbit[-1]))}" r="3" '
                f'fill="#2e7d32"/>')
    return "\n".join(body + ["</svg>"]) + "\n"


def _title(pm: ProjectiveMap, what: str) -> str:
    if pm.mu is None:
        return what
    mu = Fraction(pm.mu)
    text = str(mu.numerator) if mu.denominator == 1 else f"{mu.numerator}/{mu.denominator}"
    return f"{what}, mu = {text}"


def graph_svg(graph, title: str = "heteroclinic graph") -> str:
    """Oblique drawing of the cube with oriented edges labelled by index."""
    if graph.n != 3:
        raise InputError("graph drawing supports three groups only")
    scale, depth = 300.0, 140.0
    ox, oy = 200.0, 480.0

    def place(v):
        from .game import vertex_coords

        p = vertex_coords(v, 3)
        return (ox + scale * p[0] + depth * p[2] * math.cos(math.pi / 6),
                oy - scale * p[1] - depth * p[2] * math.sin(math.pi / 6))

    body = _head(title)
    body.append('<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" '
                'markerWidth="8" markerHeight="8" orient="auto-start-reverse">'
                '<path d="M 0 0 L 10 5 L 0 10 z" fill="#37474f"/></marker></defs>')
    r = 16.0
    for e in graph.edges:
        (x1, y1), (x2, y2) = place(e.source), place(e.target)
        length = math.hypot(x2 - x1, y2 - y1)
        ux, uy = (x2 - x1) / length, (y2 - y1) / length
        body.append(f'<line x1="{_f(x1 + r * ux)}" y1="{_f(y1 + r * uy)}" '
                    f'x2="{_f(x2 - r * ux)}" y2="{_f(y2 - r * uy)}" stroke="#37474f" '
                    f'stroke-width="1.5" marker-end="url(#arrow)"/>')
        body.append(f'<text x="{_f((x1 + x2) / 2 + 6)}" y="{_f((y1 + y2) / 2 - 6)}" '
                    f'font-size="12" fill="#b71c1c">{e.index}</text>')
    for v in graph.vertices:
        x, y = place(v)
        body.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(r)}" fill="white" stroke="black"/>')
        body.append(f'<text x="{_f(x)}" y="{_f(y + 4)}" font-size="12" '
                    f'text-anchor="middle">v{v}</text>')
    return "\n".join(body + ["</svg>"]) + "\n"

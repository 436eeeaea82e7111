"""Small numerical kernels: exact linear solves, cubic roots, bisection, Newton."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import ConvergenceError, NoSignChangeError

__all__ = [
    "solve_exact",
    "cubic_roots",
    "eigenvalues",
    "Bisection",
    "bisect",
    "bisect_predicate",
    "newton",
    "sig17",
]

EIG_TOL = 1e-10


def solve_exact(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]):
    """Solve ``a x = b`` over the rationals; returns None when ``a`` is singular.

    Plain Gauss-Jordan elimination, fine for the tiny systems met here.
    """
    n = len(b)
    m = [list(map(Fraction, row)) + [Fraction(b[i])] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        m[col] = [v / pv for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [vr - f * vc for vr, vc in zip(m[r], m[col])]
    return tuple(m[r][n] for r in range(n))


def _polish(coeffs, r, steps=2):
    # Newton polish on the monic cubic; keeps the closed form honest near clusters.
    b, c, d = coeffs
    for _ in range(steps):
        f = ((r + b) * r + c) * r + d
        df = (3 * r + 2 * b) * r + c
        if df == 0:
            break
        step = f / df
        if not math.isfinite(step):
            break
        r = r - step
    return r


def _quadratic(e, f):
    """Roots of ``x^2 + e x + f`` without cancellation."""
    disc = e * e - 4 * f
    if disc >= 0:
        s = math.sqrt(disc)
        q = -0.5 * (e + math.copysign(s, e))
        if q == 0:
            return 0.0, 0.0
        return q, f / q
    s = math.sqrt(-disc)
    return complex(-e / 2, s / 2), complex(-e / 2, -s / 2)


def cubic_roots(b: float, c: float, d: float) -> list:
    """Roots of ``x^3 + b x^2 + c x + d`` by Cardano's formula.

    The real root of the one-real-root branch is taken with the sign that
    avoids cancellation, polished by Newton, then deflated; the complex pair
    comes from the deflated quadratic.  Three real roots use the
    trigonometric form.  Roots are sorted by descending real part, then
    descending imaginary part.
    """
    b, c, d = float(b), float(c), float(d)
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    shift = -b / 3.0
    delta = (q / 2.0) ** 2 + (p / 3.0) ** 3
    scale = max(1.0, abs(b), abs(c) ** 0.5, abs(d) ** (1 / 3))
    if abs(p) <= 1e-15 * scale ** 2 and abs(q) <= 1e-15 * scale ** 3:
        roots = [shift, shift, shift]
    elif delta > 0:
        big = -math.copysign(1.0, q) * np.cbrt(abs(q) / 2.0 + math.sqrt(delta))
        small = -p / (3.0 * big) if big != 0 else 0.0
        r = _polish((b, c, d), big + small + shift)
        e = b + r
        f = c + e * r
        roots = [r, *_quadratic(e, f)]
    else:
        rad = math.sqrt(-p / 3.0)
        arg = (3.0 * q / (2.0 * p)) * math.sqrt(-3.0 / p)
        theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        roots = [
            _polish((b, c, d), 2.0 * rad * math.cos(theta - 2.0 * math.pi * k / 3.0) + shift)
            for k in range(3)
        ]
    out = [complex(r) for r in roots]
    out.sort(key=lambda z: (-z.real, -z.imag))
    return out


def eigenvalues(mat) -> list:
    """Eigenvalues of a small real matrix.

    3x3 goes through :func:`cubic_roots` and is checked against the
    characteristic polynomial; anything else, or a failed check, falls back
    to LAPACK's QR iteration.
    """
    m = np.asarray(mat, dtype=float)
    if m.shape == (3, 3):
        tr = m[0, 0] + m[1, 1] + m[2, 2]
        minors = (
            m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
            + m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
            + m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1]
        )
        det = float(np.linalg.det(m))
        roots = cubic_roots(-tr, minors, -det)
        norm = max(1.0, float(np.abs(m).max()))
        ok = all(
            abs(((z - tr) * z + minors) * z - det) <= 1e-8 * norm ** 3 for z in roots
        )
        if ok:
            return roots
    vals = [complex(v) for v in np.linalg.eigvals(m)]
    vals.sort(key=lambda z: (-z.real, -z.imag))
    return vals


@dataclass(frozen=True)
class Bisection:
    """Outcome of a bisection: root estimate, final bracket and functional value."""

    x: float
    lo: float
    hi: float
    fx: float
    iterations: int


def bisect(f: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-12,
           ftol: float | None = None, max_iter: int = 300) -> Bisection:
    """Bisection on a sign change of ``f``; stops when the bracket is below
    ``xtol`` and, if given, ``|f| <= ftol``."""
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return Bisection(lo, lo, hi, flo, 0)
    if fhi == 0:
        return Bisection(hi, lo, hi, fhi, 0)
    if (flo > 0) == (fhi > 0):
        raise NoSignChangeError(f"no sign change on [{lo}, {hi}]: f={flo}, {fhi}")
    mid, fmid = lo, flo
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0:
            return Bisection(mid, lo, hi, fmid, it)
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
        if hi - lo <= xtol and (ftol is None or abs(fmid) <= ftol):
            break
        if mid in (lo, hi) and lo != hi and np.nextafter(lo, hi) == hi:
            break
    return Bisection(mid, lo, hi, fmid, it)


def bisect_predicate(pred: Callable[[float], object], lo: float, hi: float,
                     xtol: float = 1e-9, max_iter: int = 200):
    """Locate where ``pred`` changes value between ``lo`` and ``hi``.

    Returns ``(lo, hi)`` with ``pred(lo) == pred(original lo)`` and
    ``pred(hi) != pred(original lo)``.
    """
    left = pred(lo)
    if pred(hi) == left:
        raise NoSignChangeError(f"predicate constant on [{lo}, {hi}]")
    for _ in range(max_iter):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        if pred(mid) == left:
            lo = mid
        else:
            hi = mid
    return lo, hi


def newton(fun: Callable, jac: Callable, x0, max_iter: int = 60, step_tol: float = 1e-13,
           res_tol: float = 1e-10):
    """Damped Newton: halve the step while the residual grows.

    Returns the converged point; raises :class:`ConvergenceError` otherwise.
    """
    x = np.array(x0, dtype=float)
    r = np.asarray(fun(x), dtype=float)
    nr = float(np.linalg.norm(r, np.inf))
    for _ in range(max_iter):
        try:
            step = np.linalg.solve(np.asarray(jac(x), dtype=float), -r)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError("singular Jacobian in Newton iteration") from exc
        lam = 1.0
        while True:
            xn = x + lam * step
            rn = np.asarray(fun(xn), dtype=float)
            nrn = float(np.linalg.norm(rn, np.inf))
            if nrn <= nr or lam < 1e-6:
                break
            lam *= 0.5
        x, r, nr = xn, rn, nrn
        if float(np.linalg.norm(lam * step, np.inf)) < step_tol:
            break
    if not np.all(np.isfinite(x)) or nr > res_tol:
        raise ConvergenceError(f"Newton stopped with residual {nr:.3e}")
    return x


def sig17(x: float) -> str:
    """Float text with 17 significant digits (round-trip exact, deterministic)."""
    return format(float(x), ".17g")

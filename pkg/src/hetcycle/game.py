"""Polymatrix games on products of 1-simplices and their replicator field.

A game with ``n`` groups of two strategies lives on the product of ``n``
segments.  The cube coordinate ``p_i`` is the frequency of the *second*
strategy of group ``i``, so the simplex point is
``(1 - p_1, p_1, 1 - p_2, p_2, ...)``.

Faces are numbered from 1 to ``2n``: face ``2i - 1`` is ``{p_i = 1}`` and
face ``2i`` is ``{p_i = 0}``.  With this numbering, face ``j`` is exactly
the set where simplex coordinate ``x_j`` vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Sequence

import numpy as np

from .errors import InputError

__all__ = [
    "PolymatrixGame",
    "as_rational",
    "build_mu_family",
    "reduce_payoff",
    "affine_payoff",
    "payoff_difference",
    "field_cube",
    "field_simplex",
    "field_cube_general",
    "cube_to_simplex",
    "simplex_to_cube",
    "vertex_coords",
    "vertex_index",
    "face_of",
    "faces_at",
    "MU_INTERVAL",
]

# Parameter range on which the built-in family carries its heteroclinic network.
MU_INTERVAL = (Fraction(850, 11), Fraction(544, 5))


def as_rational(value) -> Fraction:
    """Convert ints, Fractions, decimal strings and ``"p/q"`` strings to a Fraction.

    Floats are converted exactly (their binary value), which keeps regression
    identities reproducible but is rarely what a user wants; prefer strings.
    """
    if isinstance(value, bool):
        raise InputError(f"not a number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        if not np.isfinite(value):
            raise InputError(f"not a finite number: {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse {value!r} as a rational number") from exc
    raise InputError(f"not a number: {value!r}")


@dataclass(frozen=True)
class PolymatrixGame:
    """Group structure plus a block payoff matrix.

    Parameters
    ----------
    groups : tuple of int
        Strategies per group.  The replicator machinery below needs every
        entry to equal 2.
    payoff : tuple of tuple of Fraction
        Square matrix of size ``sum(groups)``, stored exactly.
    mu : Fraction, optional
        Parameter value when the game comes from the built-in family.
    """

    groups: tuple
    payoff: tuple
    mu: Fraction | None = field(default=None, compare=False)

    def __post_init__(self):
        groups = tuple(int(g) for g in self.groups)
        if not groups or any(g < 1 for g in groups):
            raise InputError("groups must be a nonempty list of positive integers")
        size = sum(groups)
        rows = tuple(tuple(as_rational(v) for v in row) for row in self.payoff)
        if len(rows) != size or any(len(r) != size for r in rows):
            raise InputError(
                f"payoff must be {size}x{size} for groups {list(groups)}"
            )
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "payoff", rows)

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @property
    def size(self) -> int:
        return sum(self.groups)

    @cached_property
    def offsets(self) -> tuple:
        out, k = [], 0
        for g in self.groups:
            out.append(k)
            k += g
        return tuple(out)

    def entry(self, i: int, j: int) -> Fraction:
        """1-based matrix entry."""
        return self.payoff[i - 1][j - 1]

    @cached_property
    def affine(self):
        """Exact ``(c, A)`` with payoff difference ``g(p) = c + A p`` on the cube."""
        return affine_payoff(self)

    @cached_property
    def affine_float(self):
        c, a = self.affine
        return (
            np.array([float(v) for v in c]),
            np.array([[float(v) for v in row] for row in a]),
        )

    def to_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.payoff])


def _require_binary(game: PolymatrixGame):
    if any(g != 2 for g in game.groups):
        raise InputError("every group must have exactly two strategies")


def build_mu_family(mu) -> PolymatrixGame:
    """The one-parameter family ``P_mu`` on three groups of two strategies."""
    mu = as_rational(mu)
    z = 0
    payoff = (
        (102, mu, 0, -158, -18, -9),
        (z, z, z, z, z, z),
        (-51, 51, 0, 0, -9, 18),
        (z, z, z, z, z, z),
        (-102, -153, 237, 0, 27, 9),
        (z, z, z, z, z, z),
    )
    return PolymatrixGame((2, 2, 2), payoff, mu=mu)


def reduce_payoff(game: PolymatrixGame) -> PolymatrixGame:
    """Subtract each group's second row from both of its rows, block by block.

    Adding a constant to a column within one group's block row does not
    change payoff differences, so the replicator field is unchanged.
    """
    _require_binary(game)
    rows = [list(r) for r in game.payoff]
    for start in game.offsets:
        second = rows[start + 1]
        rows[start] = [a - b for a, b in zip(rows[start], second)]
        rows[start + 1] = [Fraction(0)] * game.size
    return PolymatrixGame(game.groups, tuple(tuple(r) for r in rows), mu=game.mu)


def payoff_difference(game: PolymatrixGame, i: int) -> tuple:
    """Row ``2i`` minus row ``2i - 1`` (1-based groups), i.e. the payoff edge of strategy two."""
    start = game.offsets[i]
    return tuple(b - a for a, b in zip(game.payoff[start], game.payoff[start + 1]))


def affine_payoff(game: PolymatrixGame):
    """Return ``(c, A)`` as nested tuples of Fractions.

    ``g_i(p) = (Px)_{2i} - (Px)_{2i-1}`` is affine in ``p`` because each
    ``x`` block is ``(1 - p_j, p_j)``.
    """
    _require_binary(game)
    n = game.n_groups
    c, a = [], []
    for i in range(n):
        diff = payoff_difference(game, i)
        c.append(sum((diff[2 * j] for j in range(n)), Fraction(0)))
        a.append(tuple(diff[2 * j + 1] - diff[2 * j] for j in range(n)))
    return tuple(c), tuple(a)


def _check_cube(game: PolymatrixGame, p) -> None:
    if len(p) != game.n_groups:
        raise InputError(f"expected {game.n_groups} cube coordinates, got {len(p)}")


def field_cube(game: PolymatrixGame, p: Sequence, exact: bool = False):
    """Replicator velocity in cube coordinates, ``p_i (1 - p_i) g_i(p)``.

    With ``exact=True`` the computation runs in Fractions and returns a tuple;
    otherwise a float ndarray is returned.
    """
    _check_cube(game, p)
    if exact:
        c, a = game.affine
        p = [as_rational(v) for v in p]
        g = [c[i] + sum((a[i][j] * p[j] for j in range(len(p))), Fraction(0))
             for i in range(len(p))]
        return tuple(p[i] * (1 - p[i]) * g[i] for i in range(len(p)))
    c, a = game.affine_float
    p = np.asarray(p, dtype=float)
    return p * (1.0 - p) * (c + a @ p)


def _check_simplex(game: PolymatrixGame, x, tol: float) -> None:
    if len(x) != game.size:
        raise InputError(f"expected {game.size} simplex coordinates, got {len(x)}")
    for start, g in zip(game.offsets, game.groups):
        s = sum(x[start:start + g])
        if abs(float(s) - 1.0) > tol:
            raise InputError(f"group starting at coordinate {start + 1} sums to {float(s)}, not 1")
        if any(float(v) < -tol for v in x[start:start + g]):
            raise InputError("simplex coordinates must be nonnegative")


def field_simplex(game: PolymatrixGame, x: Sequence, tol: float = 1e-12) -> np.ndarray:
    """Polymatrix replicator field on the product of simplices.

    ``dx_k = x_k ((Px)_k - sum_{l in group(k)} x_l (Px)_l)``; works for any
    group sizes.
    """
    _check_simplex(game, x, tol)
    x = np.asarray(x, dtype=float)
    px = game.to_array() @ x
    out = np.empty_like(x)
    for start, g in zip(game.offsets, game.groups):
        blk = slice(start, start + g)
        avg = float(x[blk] @ px[blk])
        out[blk] = x[blk] * (px[blk] - avg)
    return out


def field_cube_general(game: PolymatrixGame, p: Sequence) -> np.ndarray:
    """Cube field computed through the simplex field, without any reduction."""
    _require_binary(game)
    vel = field_simplex(game, cube_to_simplex(p))
    return vel[1::2].copy()


def cube_to_simplex(p: Sequence) -> tuple:
    """``(p_1, ..., p_n) -> (1 - p_1, p_1, ..., 1 - p_n, p_n)``; exact for Fractions."""
    out = []
    for v in p:
        if not 0 <= v <= 1:
            raise InputError(f"cube coordinate {v!r} outside [0, 1]")
        out.extend((1 - v, v))
    return tuple(out)


def simplex_to_cube(x: Sequence, tol: float = 0.0) -> tuple:
    """Inverse of :func:`cube_to_simplex` for two-strategy groups."""
    if len(x) % 2:
        raise InputError("simplex vector must have even length")
    out = []
    for k in range(0, len(x), 2):
        a, b = x[k], x[k + 1]
        if a < -tol or b < -tol or abs(float(a + b) - 1.0) > tol:
            raise InputError(f"group {k // 2 + 1} is not a point of the segment")
        out.append(b)
    return tuple(out)


def vertex_coords(index: int, n: int) -> tuple:
    """Cube vertex with 1-based ``index = 1 + sum_i p_i 2^(n-1-i)``."""
    if not 1 <= index <= 2 ** n:
        raise InputError(f"vertex index {index} outside 1..{2 ** n}")
    k = index - 1
    return tuple((k >> (n - 1 - i)) & 1 for i in range(n))


def vertex_index(coords: Sequence) -> int:
    n = len(coords)
    return 1 + sum(int(c) << (n - 1 - i) for i, c in enumerate(coords))


def face_of(coord: int, value: int) -> int:
    """1-based face index of ``{p_coord = value}`` (``coord`` is 0-based)."""
    return 2 * coord + 1 if value == 1 else 2 * coord + 2


def faces_at(index: int, n: int) -> tuple:
    """Faces containing a vertex, listed by coordinate."""
    v = vertex_coords(index, n)
    return tuple(face_of(i, v[i]) for i in range(n))

"""Möbius algebra, branch geometry, periodic points and regime bookkeeping."""

from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import closed_forms as cf
from hetcycle.errors import InputError
from hetcycle.game import MU_INTERVAL, build_mu_family
from hetcycle.projective import (
    Mobius,
    build_projective_map,
    classify_regime,
    derivative,
    detect_thresholds,
    evaluate,
    periodic_points,
)

LO, HI = MU_INTERVAL
rational_mu = st.fractions(min_value=LO, max_value=HI, max_denominator=1000)
coef = st.fractions(min_value=-20, max_value=20, max_denominator=9)
unit_q = st.fractions(min_value=0, max_value=1, max_denominator=97)


@st.composite
def mobius(draw):
    m = Mobius(draw(coef), draw(coef), draw(coef), draw(coef))
    assume(m.a * m.d - m.b * m.c != 0)
    return m


@settings(max_examples=100, deadline=None)
@given(mobius(), mobius(), coef)
def test_composition(f, g, x):
    assume(g.c * x + g.d != 0)
    y = g(x)
    assume(f.c * y + f.d != 0)
    assert f.after(g)(x) == f(y)


@settings(max_examples=100, deadline=None)
@given(mobius(), st.integers(0, 1), st.integers(0, 1), unit_q)
def test_shift_conjugates(m, src, dst, x):
    assume(m.c * x + m.d != 0)
    assert m.shifted(src, dst)(x + src) == m(x) + dst


@settings(max_examples=100, deadline=None)
@given(mobius())
def test_fixed_points_are_fixed(m):
    for x in m.fixed_points():
        if isinstance(x, F):
            assume(m.c * x + m.d != 0)
            assert m(x) == x
        else:
            den = float(m.c) * x + float(m.d)
            assume(abs(den) > 1e-6)
            assert abs((float(m.a) * x + float(m.b)) / den - x) <= 1e-9 * max(1.0, abs(x))


@settings(max_examples=20, deadline=None)
@given(rational_mu, unit_q)
def test_branches_are_monotone_into_target_edge(mu, t):
    pm = build_projective_map(build_mu_family(mu))
    for b in pm.branches:
        x = b.lo + (b.hi - b.lo) * t
        y = b.mobius(x)
        assert b.target <= y <= b.target + 1
        assert b.mobius.derivative(b.lo) * b.mobius.derivative(x) > 0


@settings(max_examples=20, deadline=None)
@given(rational_mu)
def test_intervals_tile_both_edges(mu):
    pm = build_projective_map(build_mu_family(mu))
    assert [b.label for b in pm.branches] == ["J1", "J3", "J2", "J6", "J4", "J5"]
    edges = [F(0)] + [b.hi for b in pm.branches]
    assert edges == pm.breakpoints
    for b, nxt in zip(pm.branches, pm.branches[1:]):
        assert b.hi == nxt.lo


def test_endpoint_flags():
    pm = build_projective_map(build_mu_family(96))
    flags = [(b.lo_closed, b.hi_closed) for b in pm.branches]
    assert flags == [(True, False), (False, False), (False, True),
                     (True, False), (False, False), (False, True)]


def test_cobweb_converges_to_attracting_fixed_point():
    mu = F(96)
    pm = build_projective_map(build_mu_family(mu))
    for target in (cf.fixed_point_j1(mu), cf.fixed_point_j6(mu)):
        x = float(target) + 1e-3
        for _ in range(200):
            x, _ = evaluate(pm, x)
        assert abs(x - float(target)) <= 1e-12


def test_evaluate_boundaries():
    pm = build_projective_map(build_mu_family(96))
    assert evaluate(pm, 1) == (1, None)
    with pytest.raises(InputError):
        evaluate(pm, pm.breakpoints[1])
    with pytest.raises(InputError):
        evaluate(pm, 2.5)
    with pytest.raises(InputError):
        derivative(pm, 0)


def test_orbits_are_reported_once():
    pm = build_projective_map(build_mu_family(101))
    pts = periodic_points(pm, 4)
    orbits = [frozenset(round(x, 9) for x in p.orbit) for p in pts]
    assert len(orbits) == len(set(orbits))
    with pytest.raises(InputError):
        periodic_points(pm, 0)


def test_period_two_orbit_carries_glue_cycle():
    for mu, (_, glue, _) in cf.REGIME_ROWS.items():
        if mu == 90:
            continue
        twos = [p for p in periodic_points(build_projective_map(build_mu_family(mu)), 2)
                if p.period == 2]
        assert [p.cycle for p in twos] == [glue]


def test_regime_is_indeterminate_at_transcritical():
    rec = classify_regime(F(102))
    assert rec.indeterminate
    assert rec.case is None
    assert rec.bracket[0] < 102 < rec.bracket[1]


def test_no_thresholds_on_quiet_range():
    assert detect_thresholds(80, 85, 20) == []
    with pytest.raises(InputError):
        detect_thresholds(85, 80, 20)

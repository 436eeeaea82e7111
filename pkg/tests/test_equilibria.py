"""Vertex spectra, facet and interior equilibria, Hopf and transcritical points."""

from __future__ import annotations

from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

import closed_forms as cf
from hetcycle.equilibria import (
    all_equilibria,
    check_nonresonance,
    classify,
    collinearity_residual,
    face_equilibria,
    find_hopf,
    find_transcritical,
    interior_equilibrium,
    jacobian,
    resonant_parameters,
    transcritical_functional,
    vertex_spectrum,
)
from hetcycle.errors import InputError
from hetcycle.game import MU_INTERVAL, build_mu_family, field_cube

LO, HI = MU_INTERVAL
rational_mu = st.fractions(min_value=LO, max_value=HI, max_denominator=1000)
open_mu = rational_mu.filter(lambda m: LO < m < HI)


@settings(max_examples=30, deadline=None)
@given(rational_mu)
def test_vertex_eigenvalues_match_closed_form(mu):
    table = cf.vertex_eigenvalues(mu)
    assert {r.vertex: r.eigen_directions for r in vertex_spectrum(build_mu_family(mu))} == table


@settings(max_examples=30, deadline=None)
@given(open_mu)
def test_equilibria_are_exact_zeros(mu):
    game = build_mu_family(mu)
    for rec in face_equilibria(game) + [interior_equilibrium(game)]:
        assert all(v == 0 for v in field_cube(game, rec.exact_location, exact=True))
    assert interior_equilibrium(game).exact_location == cf.interior_point(mu)


@settings(max_examples=30, deadline=None)
@given(open_mu)
def test_interior_point_lies_between_facet_points(mu):
    residual, k = collinearity_residual(mu)
    assert residual <= 1e-12
    assert k == cf.segment_parameter(mu)
    assert 0 < k < 1


def test_facet_records():
    recs = {r.name: r for r in face_equilibria(build_mu_family(90))}
    assert recs["B1"].face == 5 and recs["B2"].face == 6
    assert recs["B1"].classification == "saddle-focus(1,2)"


def _hopf_determinant(mu):
    """Hurwitz product ``a1 a2 - a3`` of the Jacobian at the closed-form interior point."""
    m = F(mu)
    j = np.array(jacobian(build_mu_family(m), cf.interior_point(m), exact=True), dtype=float)
    a1 = -np.trace(j)
    a2 = sum(j[i, i] * j[k, k] - j[i, k] * j[k, i] for i in range(3) for k in range(i + 1, 3))
    a3 = -np.linalg.det(j)
    return a1 * a2 - a3


def test_hopf_matches_hurwitz_root():
    oracle = brentq(_hopf_determinant, 104.5, 105.5, xtol=1e-13)
    event = find_hopf()
    assert abs(event.mu_star - oracle) <= 1e-8
    assert event.bracket[0] < event.mu_star < event.bracket[1]
    assert event.subject == "O"


def test_transcritical_at_closed_form_value():
    assert cf.facet_focus_pairs(F(102))["B1"][0] == 0
    event = find_transcritical()
    assert abs(event.mu_star - 102) <= 1e-10
    assert transcritical_functional(build_mu_family, 101.5) > 0 > transcritical_functional(build_mu_family, 102.5)


def test_facet_points_become_sinks_after_transcritical():
    for rec in face_equilibria(build_mu_family(105)):
        assert rec.classification == "sink"


def test_interior_merges_at_endpoints():
    for mu in MU_INTERVAL:
        assert interior_equilibrium(build_mu_family(mu)) is None
    with pytest.raises(InputError):
        collinearity_residual(HI)


def test_classify():
    assert classify([1, 2, 3]) == "source"
    assert classify([-1, -2]) == "sink"
    assert classify([1, -2]) == "saddle"
    assert classify([complex(1, 2), complex(1, -2), -3]) == "saddle-focus(1,2)"
    assert classify([0.0, 1.0]) == "non-hyperbolic"


def test_nonresonance_witnesses():
    assert not check_nonresonance([1, 2, 3]).passed
    assert check_nonresonance([1, -2.5, 7]).passed


def test_resonances_are_exact():
    found = resonant_parameters(lo=LO, hi=HI)
    assert found
    for mu, vertex, (i, j, k) in found:
        lam = [v for _, v in sorted(cf.vertex_eigenvalues(mu)[vertex].items())]
        assert lam[i] == lam[j] + lam[k]
    assert all(check_nonresonance(r).passed for r in vertex_spectrum(build_mu_family(F(96))))


def test_all_equilibria_names():
    names = [r.name for r in all_equilibria(build_mu_family(90))]
    assert names == [f"v{k}" for k in range(1, 9)] + ["B1", "B2", "O"]


def test_float_and_exact_jacobian_agree():
    game = build_mu_family(F(99))
    p = (F(1, 5), F(2, 3), F(3, 7))
    exact = np.array(jacobian(game, p, exact=True), dtype=float)
    assert np.allclose(exact, jacobian(game, [float(v) for v in p]))

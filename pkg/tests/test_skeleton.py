"""Characters, structural sets, branch sectors and cycle decompositions."""

from __future__ import annotations

import itertools
from fractions import Fraction as F

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import closed_forms as cf
from hetcycle.errors import InputError
from hetcycle.game import MU_INTERVAL, build_mu_family
from hetcycle.network import graph_for
from hetcycle.skeleton import (
    HalfPlane,
    Sector,
    build_skeleton,
    character,
    cycle_matrix,
    eigen_verdict,
    pick_canonical,
    structural_sets,
)

LO, HI = MU_INTERVAL
rational_mu = st.fractions(min_value=LO, max_value=HI, max_denominator=1000)
EXPECTED_SETS = [(5, 6), (5, 8), (5, 10), (5, 12), (7, 8), (8, 9), (8, 11), (9, 10), (11, 12)]


def _hits_every_cycle(edges, graph):
    dg = nx.DiGraph()
    dg.add_nodes_from(graph.vertices)
    dg.add_edges_from((e.source, e.target) for e in graph.edges if e.index not in edges)
    return nx.is_directed_acyclic_graph(dg)


def test_structural_sets_match_brute_force():
    graph = graph_for(build_mu_family(96))
    idx = [e.index for e in graph.edges]
    assert not any(_hits_every_cycle({i}, graph) for i in idx)
    oracle = [c for c in itertools.combinations(idx, 2) if _hits_every_cycle(set(c), graph)]
    assert sorted(structural_sets(graph)) == oracle == EXPECTED_SETS
    assert pick_canonical(oracle, graph) == (5, 8)


@settings(max_examples=20, deadline=None)
@given(rational_mu)
def test_characters_negate_vertex_eigenvalues(mu):
    skel = build_skeleton(build_mu_family(mu))
    table = cf.vertex_eigenvalues(mu)
    for rec in skel.spectra:
        ch = character(rec)
        for face in range(1, 7):
            assert ch[face] == -table[rec.vertex].get(face, 0)


@settings(max_examples=20, deadline=None)
@given(rational_mu)
def test_branch_sectors_match_closed_form(mu):
    skel = build_skeleton(build_mu_family(mu))
    forms = cf.branch_sectors(mu)
    for b in skel.branches:
        got = sorted(h.normalized().coeffs for h in b.sector.halfplanes)
        want = sorted(HalfPlane(f).normalized().coeffs for f in forms[b.id])
        assert got == want, b.id


@settings(max_examples=20, deadline=None)
@given(rational_mu)
def test_branch_matrices_match_closed_form(mu):
    skel = build_skeleton(build_mu_family(mu))
    assert {b.id: b.matrix for b in skel.branches} == cf.branch_matrices(mu)


def test_edge_faces_of_structural_set():
    graph = graph_for(build_mu_family(90))
    assert graph.edge(5).faces == (2, 6)
    assert graph.edge(8).faces == (1, 5)


def test_branch_paths():
    skel = build_skeleton(build_mu_family(90))
    assert [b.edges for b in skel.branches] == [
        (5, 11, 7, 9, 5), (5, 2, 12, 8), (5, 11, 4, 8),
        (8, 10, 1, 5), (8, 3, 9, 5), (8, 10, 6, 12, 8),
    ]


def test_decompose_round_trips():
    skel = build_skeleton(build_mu_family(96))
    for cyc in skel.graph.cycles:
        assert skel.cycle_of(skel.decompose(cyc)) == cyc
    names = {v: k for k, v in skel.graph.cycle_names().items()}
    assert skel.decompose(names["H6"], 5) == [1]
    assert skel.decompose(names["H2"], 8) == [4, 2]
    with pytest.raises(InputError):
        skel.decompose(names["H1"], 5)


def test_cycle_matrix_requires_concatenation():
    skel = build_skeleton(build_mu_family(96))
    with pytest.raises(InputError):
        cycle_matrix(skel, [1, 4])


def test_sector_membership_and_interval():
    s = Sector((1, 5), (HalfPlane((F(1445), F(-297))), HalfPlane((F(-31), F(27)))))
    assert s.contains((1.0, 2.0)) is True
    assert s.contains((1.0, 1.0)) is False
    assert s.contains((1.0, 10.0)) is False
    assert s.contains((297.0, 1445.0)) is None
    lo, hi, _, _ = s.interval()
    assert (lo, hi) == (F(297, 1742), F(27, 58))
    assert not s.is_empty()
    assert Sector((1, 5), (HalfPlane((F(-1), F(-1))),)).is_empty()


def test_halfplane_text():
    assert HalfPlane((F(1445, 3), F(-99))).text(["u1", "u5"]) == "1445u1 - 297u5 > 0"
    assert HalfPlane((F(-1), F(2))).text(["a", "b"]) == "-a + 2b > 0"


def test_eigen_verdicts():
    orthant = Sector((2, 6))
    assert eigen_verdict(((2, 1), (1, 2)), orthant).verdict == "attracting"
    narrow = Sector((2, 6), (HalfPlane((F(-1), F(3))), HalfPlane((F(1), F(-2)))))
    assert eigen_verdict(((2, 1), (1, 2)), narrow).verdict == "escapes-sector"
    # Eigenvalue 3 on (1, 2) and 1 on (2, 1).
    mat = ((F(1, 3), F(4, 3)), (F(-4, 3), F(11, 3)))
    assert eigen_verdict(mat, Sector((2, 6), (HalfPlane((F(1), F(-1))),))).verdict == "repelling"
    assert eigen_verdict(mat, Sector((2, 6), (HalfPlane((F(-1), F(1))),))).verdict == "attracting"
    assert eigen_verdict(((0, -1), (1, 0)), orthant).verdict == "degenerate"
    assert eigen_verdict(((1, 0), (0, 1)), orthant).verdict == "degenerate"

"""Edge orientation, cycle enumeration and switching nodes."""

from __future__ import annotations

from fractions import Fraction as F

import networkx as nx
import pytest

from hetcycle.equilibria import vertex_spectrum
from hetcycle.errors import NonGenericError
from hetcycle.game import MU_INTERVAL, PolymatrixGame, build_mu_family
from hetcycle.network import (
    build_graph,
    cycle_edges,
    enumerate_cycles,
    graph_for,
    open_edge_violations,
    switching_nodes,
    to_dot,
)

SAMPLES = [MU_INTERVAL[0], F(90), F(96), F(101), F(103), MU_INTERVAL[1]]

# Oriented edges read off the vertex eigenvalue signs of the family.
EXPECTED_EDGES = {
    1: (2, 1), 2: (3, 4), 3: (6, 5), 4: (7, 8), 5: (1, 3), 6: (2, 4),
    7: (7, 5), 8: (8, 6), 9: (5, 1), 10: (6, 2), 11: (3, 7), 12: (4, 8),
}
EXPECTED_CYCLES = {
    "H1": (2, 4, 8, 6),
    "H2": (1, 3, 4, 8, 6, 2),
    "H3": (1, 3, 4, 8, 6, 5),
    "H4": (1, 3, 7, 8, 6, 2),
    "H5": (1, 3, 7, 8, 6, 5),
    "H6": (1, 3, 7, 5),
}


def _canonical(cycle):
    k = cycle.index(min(cycle))
    return tuple(cycle[k:] + cycle[:k])


@pytest.mark.parametrize("mu", SAMPLES)
def test_orientation_does_not_depend_on_mu(mu):
    g = graph_for(build_mu_family(mu))
    assert {e.index: (e.source, e.target) for e in g.edges} == EXPECTED_EDGES


@pytest.mark.parametrize("mu", SAMPLES)
def test_cycles_match_networkx(mu):
    g = graph_for(build_mu_family(mu))
    dg = nx.DiGraph((e.source, e.target) for e in g.edges)
    oracle = {_canonical(c) for c in nx.simple_cycles(dg)}
    assert set(g.cycles) == oracle
    assert {v: k for k, v in g.cycle_names().items()} == EXPECTED_CYCLES


def test_cycle_edges_traverse_the_cycle():
    g = graph_for(build_mu_family(96))
    assert cycle_edges(g, EXPECTED_CYCLES["H6"]) == (5, 11, 7, 9)
    assert cycle_edges(g, EXPECTED_CYCLES["H1"]) == (6, 12, 8, 10)
    with pytest.raises(NonGenericError):
        cycle_edges(g, (1, 2))


def test_short_cycle_bound():
    g = graph_for(build_mu_family(96))
    assert set(enumerate_cycles(g, max_len=4)) == {EXPECTED_CYCLES["H1"], EXPECTED_CYCLES["H6"]}


@pytest.mark.parametrize("mu", SAMPLES)
def test_switching_nodes(mu):
    game = build_mu_family(mu)
    g = graph_for(game)
    assert switching_nodes(g, vertex_spectrum(game)) == {2, 3, 6, 7}


@pytest.mark.parametrize("mu", SAMPLES)
def test_edges_carry_no_equilibria(mu):
    assert open_edge_violations(build_mu_family(mu)) == []


def test_zero_eigenvalue_is_rejected():
    game = PolymatrixGame((2, 2), [[0] * 4] * 4)
    with pytest.raises(NonGenericError):
        build_graph(vertex_spectrum(game))


def test_equal_signs_are_rejected():
    # g1 = 2 p1 - 1 vanishes mid-edge, so both ends attract along coordinate 1.
    game = PolymatrixGame((2, 2), [[1, -1, 0, 0], [0, 0, 0, 0], [0, 0, -1, -1], [0, 0, 0, 0]])
    with pytest.raises(NonGenericError):
        build_graph(vertex_spectrum(game))


def test_dot_output():
    text = to_dot(graph_for(build_mu_family(96)))
    assert text.startswith("digraph heteroclinic {")
    assert text.count("->") == 12
    assert 'v1 -> v3 [label="γ5"]' in text

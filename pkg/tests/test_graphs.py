import json
from fractions import Fraction

import pytest
from hypothesis import given

from commons_lab.config import GuardExceeded
from commons_lab.graphs import (
    MAX_PATTERN_NODES,
    PatternGraph,
    WeightedGraph,
    complete_graph,
    cycle_graph,
    dumps_graph,
    loads_graph,
    named_pattern,
    path_graph,
)
from commons_lab.rational import decimal_repr, format_rational, to_rational
from strategies import patterns, weighted_graphs


def test_pattern_rejects_loops_duplicates_and_isolated_nodes():
    with pytest.raises(ValueError):
        PatternGraph(3, ((0, 0), (1, 2)))
    with pytest.raises(ValueError):
        PatternGraph(3, ((0, 1), (1, 0), (1, 2)))
    with pytest.raises(ValueError):
        PatternGraph(3, ((0, 1),))
    assert PatternGraph(3, ((0, 1),), allow_isolated=True).n == 3


def test_pattern_node_cap():
    n = MAX_PATTERN_NODES + 1
    with pytest.raises((ValueError, GuardExceeded)):
        PatternGraph(n, tuple((i, i + 1) for i in range(n - 1)))


def test_named_patterns():
    assert named_pattern("k4") == complete_graph(4)
    assert named_pattern("C5") == cycle_graph(5)
    assert named_pattern("p3") == path_graph(3)
    assert named_pattern("2k2").edge_count == 2
    assert named_pattern("paw").degrees == (2, 2, 3, 1)
    tp = named_pattern("pentagon-triangle")
    assert (tp.n, tp.edge_count) == (7, 8)
    with pytest.raises(ValueError):
        named_pattern("q7")


def test_weighted_graph_drops_zeros_and_normalises_pairs():
    g = WeightedGraph.from_edges(3, [(2, 0, "1/2"), (1, 2, 0)])
    assert g.weights == (((0, 2), Fraction(1, 2)),)
    assert g.weight(2, 0) == Fraction(1, 2)
    assert g.weight(0, 1) == 0
    with pytest.raises(ValueError):
        WeightedGraph.from_edges(2, [(0, 0, 1)])


def test_pm1_and_balance_predicates():
    g = WeightedGraph.from_edges(3, [(0, 1, 1), (0, 2, -1)])
    assert g.is_pm1()
    assert not g.is_balanced()
    h = WeightedGraph.from_edges(2, [(0, 1, 1), (0, 0, -1), (1, 1, -1)], allow_loops=True)
    assert h.is_balanced()


@given(patterns(max_n=7))
def test_pattern_json_roundtrip(F):
    text = dumps_graph(F)
    assert loads_graph(text) == F
    assert dumps_graph(loads_graph(text)) == text


@given(weighted_graphs())
def test_weighted_json_roundtrip(G):
    text = dumps_graph(G)
    back = loads_graph(text)
    assert back == G
    assert dumps_graph(back) == text
    obj = json.loads(text)
    assert obj["kind"] == "weighted" and all(isinstance(e[2], str) for e in obj["edges"])


def test_json_unweighted_edges_default_to_one():
    g = loads_graph('{"kind":"weighted","n":2,"edges":[[0,1]],"allow_loops":false}')
    assert g.weight(0, 1) == 1


def test_rational_helpers():
    assert to_rational("3/6") == Fraction(1, 2)
    assert format_rational(Fraction(-4, 2)) == "-2"
    assert format_rational(Fraction(2, -6)) == "-1/3"
    with pytest.raises(TypeError):
        to_rational(0.5)
    with pytest.raises(TypeError):
        to_rational(True)
    assert decimal_repr(Fraction(1, 4)) == "0.25"
    assert decimal_repr(Fraction(-3, 10**400)).startswith("-3e-400")

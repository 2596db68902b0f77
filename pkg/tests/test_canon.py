from itertools import permutations
from math import factorial

from hypothesis import given

from commons_lab.canon import (
    are_isomorphic,
    automorphism_count,
    automorphism_count_bruteforce,
    canonical_form,
    canonical_key,
)
from commons_lab.graphs import PatternGraph, complete_graph, cycle_graph, path_graph
from commons_lab.structure import all_graphs
from strategies import patterns


def brute_canonical(g: PatternGraph) -> tuple:
    """Lexicographically smallest sorted edge list over all relabelings."""
    best = None
    for perm in permutations(range(g.n)):
        e = tuple(sorted(tuple(sorted((perm[u], perm[v]))) for u, v in g.edges))
        if best is None or e < best:
            best = e
    return best


@given(patterns(max_n=6))
def test_canonical_key_invariant_under_relabeling(F):
    for perm in list(permutations(range(F.n)))[:30]:
        assert canonical_key(F.relabel(perm)) == canonical_key(F)


def test_canonical_key_separates_classes_like_the_permutation_oracle():
    graphs = [g for n in range(1, 6) for g in all_graphs(n)]
    keys = {canonical_key(g) for g in graphs}
    oracle = {(g.n, brute_canonical(g)) for g in graphs}
    assert len(keys) == len(oracle) == len(graphs)


def test_graph_counts_match_known_sequence():
    assert [len(all_graphs(n)) for n in range(1, 7)] == [1, 2, 4, 11, 34, 156]


def test_automorphism_examples():
    assert automorphism_count(complete_graph(4)) == 24
    assert automorphism_count(path_graph(3)) == 2
    assert automorphism_count(cycle_graph(5)) == 10
    for n in range(2, 9):
        assert automorphism_count(complete_graph(n)) == factorial(n)


@given(patterns(max_n=6))
def test_automorphism_count_matches_bruteforce(F):
    assert automorphism_count(F) == automorphism_count_bruteforce(F)


def test_are_isomorphic_and_canonical_form():
    a = PatternGraph(4, ((0, 1), (1, 2), (2, 3), (3, 0)))
    b = PatternGraph(4, ((0, 2), (2, 1), (1, 3), (3, 0)))
    assert are_isomorphic(a, b)
    assert canonical_form(a) == canonical_form(b)
    assert not are_isomorphic(a, path_graph(4))

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commons_lab.commonness import coefficient, weak_local_verdict
from commons_lab.constructions import (
    MINIMAL_N,
    MINIMAL_N_VALUE,
    BipartiteGraph,
    GlueHypergraph,
    bipartite_edge_coloring,
    build_g1,
    build_g2,
    build_g3,
    build_pentagon_triangle,
    build_prop43_graph,
    dual_hypergraph,
    fano_incidence,
    g2_density_sum,
    g3_density_bound,
    g3_densities,
    g3_densities_from_n,
    heawood_graph,
    minimal_n,
    projective_plane_incidence,
    prop43_graph_balanced,
    random_regular_bipartite,
    regular_subgraph,
)
from commons_lab.graphs import complete_graph, cycle_graph
from commons_lab.homomorphism import hom, t
from commons_lab.kernels import from_weighted_graph

C4, K4 = cycle_graph(4), complete_graph(4)
TP = build_pentagon_triangle()


def scan_value(n: int) -> Fraction:
    return Fraction((n - 1) * (-n * n + 7 * n - 9), 4 * n**3)


def exact_g3_sum(n: int, N: int) -> Fraction:
    return Fraction(2, N**3) * Fraction((n - 1) * (-n * n + 9 * n - 11), 4 * n**3)


def test_g1_densities():
    G1 = build_g1()
    assert t(C4, G1) == Fraction(1, 4)
    assert t(K4, G1) == Fraction(-1, 2)


@pytest.mark.parametrize("n", range(2, 9))
def test_g2_multiplicativity_and_closed_form(n):
    G2 = build_g2(n)
    assert G2.n == 4 * n and not G2.has_loops
    direct = t(C4, G2) + t(K4, G2)
    assert direct == g2_density_sum(n) == scan_value(n)


def test_minimal_n_scan():
    assert minimal_n() == (MINIMAL_N, MINIMAL_N_VALUE)
    assert MINIMAL_N_VALUE == scan_value(38) <= Fraction(-1, 5) < scan_value(37)


def test_sources():
    h = heawood_graph()
    assert (h.left, h.regular_degree(), h.girth()) == (7, 3, 6)
    f = fano_incidence()
    assert (f.left, f.regular_degree(), f.girth()) == (7, 3, 6)
    for q in (2, 3, 5, 7):
        p = projective_plane_incidence(q)
        assert p.left == q * q + q + 1 and p.regular_degree() == q + 1 and p.girth() == 6
    with pytest.raises(ValueError):
        projective_plane_incidence(4)


def test_random_regular_bipartite_is_seeded():
    a = random_regular_bipartite(40, 3, seed=4, min_girth=6)
    assert a == random_regular_bipartite(40, 3, seed=4, min_girth=6)
    assert a.regular_degree() == 3 and a.girth() >= 6


@pytest.mark.parametrize("q", [3, 5, 7])
def test_edge_colouring_is_proper(q):
    g = projective_plane_incidence(q)
    colour = bipartite_edge_coloring(g)
    seen = set()
    for (x, y), c in zip(g.edges, colour):
        assert ("L", x, c) not in seen and ("R", y, c) not in seen
        seen |= {("L", x, c), ("R", y, c)}
    sub = regular_subgraph(g, q)
    assert sub.regular_degree() == q and sub.girth() >= 6


def test_hypergraph_from_heawood():
    H = dual_hypergraph(heawood_graph())
    assert (H.r, H.N, H.vertex_count) == (3, 7, 21)
    again = GlueHypergraph.from_json_obj(H.to_json_obj())
    assert again == H
    # no G2 has 3 nodes, so gluing must refuse
    with pytest.raises(ValueError):
        build_g3(build_g2(2), H)


def test_hypergraph_validation():
    with pytest.raises(ValueError):
        GlueHypergraph(((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 2), (1, 3)))
    with pytest.raises(ValueError):
        GlueHypergraph(((0, 1), (2, 3)), ((0, 1), (2, 3)), ((0, 2), (1, 3)))
    ok = GlueHypergraph(((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))
    assert ok.r == 2 and ok.N == 2


def test_short_girth_source_is_rejected():
    c4 = BipartiteGraph(2, 2, ((0, 0), (0, 1), (1, 0), (1, 1)))
    with pytest.raises(ValueError):
        dual_hypergraph(c4)


@pytest.fixture(scope="module")
def g3_r8():
    H = dual_hypergraph(projective_plane_incidence(7))
    return build_g3(build_g2(2), H), H.N


def test_g3_r8_matches_exact_formula(g3_r8):
    G3, N = g3_r8
    assert G3.is_balanced()
    c4, k4 = t(C4, G3), t(K4, G3)
    assert (c4, k4) == g3_densities(build_g2(2), N) == g3_densities_from_n(2, N)
    assert c4 + k4 == exact_g3_sum(2, N)
    assert c4 + k4 <= g3_density_bound(2, N, 8)


def test_g3_r16_exact_and_bound_gap():
    src = regular_subgraph(projective_plane_incidence(17), 16)
    H = dual_hypergraph(src)
    G2 = build_g2(4)
    G3 = build_g3(G2, H)
    N = H.N
    c4, k4 = t(C4, G3), t(K4, G3)
    assert k4 != 0
    assert (c4, k4) == g3_densities(G2, N) == g3_densities_from_n(4, N)
    # the "2 r^3 N" correction undercounts by a factor of two here
    excess = hom(C4, G3) - 2 * N * hom(C4, G2)
    assert excess > 2 * 16**3 * N
    assert excess <= 4 * 16**3 * N
    assert c4 + k4 > g3_density_bound(4, N, 16)


@settings(max_examples=30)
@given(st.integers(2, 60), st.integers(1, 10**4))
def test_exact_profile_closed_form(n, N):
    c4, k4 = g3_densities_from_n(n, N)
    assert c4 + k4 == exact_g3_sum(n, N)
    if n >= 8:
        assert c4 + k4 < 0


def test_exact_profile_at_minimal_n_beats_bound_sign():
    n, r = MINIMAL_N, 4 * MINIMAL_N
    assert scan_value(n) + Fraction(2, r) < 0
    c4, k4 = g3_densities_from_n(n, 22953)
    assert c4 > 0 > c4 + k4


# -- pentagon-triangle family ------------------------------------------------


def trace_count(G) -> int:
    """sum_x (A^3)_xx (A^5)_xx: closed 3- and 5-walks glued at a node."""
    A = np.zeros((G.n, G.n), dtype=np.int64)
    for (u, v), w in G.weights:
        A[u, v] = A[v, u] = int(w)
    A3 = A @ A @ A
    A5 = A3 @ A @ A
    return int(np.sum(np.diag(A3) * np.diag(A5)))


@pytest.mark.parametrize("k", range(0, 21))
def test_prop43_family_balanced_and_counted(k):
    G, how = prop43_graph_balanced(k)
    assert G.is_balanced() and G.is_pm1()
    assert G.n == 9 + 6 * k
    value = hom(TP, G)
    assert value == 92 - 4 * k == trace_count(G)


@pytest.mark.parametrize("k", [0, 1])
def test_prop43_bruteforce(k):
    G, _ = prop43_graph_balanced(k)
    assert hom(TP, G, strategy="brute") == hom(TP, G, strategy="dp") == 92 - 4 * k


@pytest.mark.parametrize("k", [0, 3, 7])
def test_prop43_signs_only_touch_the_k_term(k):
    # the constant 92 comes from v, a, b and does not depend on the signs
    G = build_prop43_graph(k)
    plain = type(G).from_edges(G.n, [(u, v, 1) for (u, v), _ in G.weights])
    assert hom(TP, plain) == 92 + 4 * k


def test_prop43_sign_flip_at_k24():
    G, _ = prop43_graph_balanced(24)
    assert hom(TP, G) == -4
    U = from_weighted_graph(G)
    for r in (2, 4, 6):
        assert coefficient(TP, U, r) == 0
    assert coefficient(TP, U, 8) < 0
    cert = weak_local_verdict(TP, U)
    assert cert.verdict == "first-nonzero-negative"
    assert cert.evidence["first_nonzero"]["exponent"] == 8


def test_prop43_k14_stays_positive():
    G, _ = prop43_graph_balanced(14)
    assert hom(TP, G) == 36
    assert coefficient(TP, from_weighted_graph(G), 8) > 0

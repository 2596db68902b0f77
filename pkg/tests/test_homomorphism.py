import json
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commons_lab import _accel
from commons_lab import homomorphism as hm
from commons_lab.config import DEFAULTS, GuardExceeded
from commons_lab.constructions import build_g1, build_g2
from commons_lab.graphs import PatternGraph, WeightedGraph, complete_graph, cycle_graph, path_graph
from commons_lab.homomorphism import hom, inj, sub, subgraph_spectrum, t, weighted_hom
from commons_lab.structure import all_graphs
from strategies import patterns, weighted_graphs


def test_g1_examples():
    G1 = build_g1()
    assert t(complete_graph(2), G1) == Fraction(1, 2)
    assert t(cycle_graph(4), G1) == Fraction(1, 4)
    assert t(complete_graph(4), G1) == Fraction(-1, 2)


def test_complete_target_counts():
    K3 = WeightedGraph.from_edges(3, [(0, 1, 1), (0, 2, 1), (1, 2, 1)])
    assert hom(complete_graph(3), K3) == 6  # proper 3-colourings
    assert hom(cycle_graph(5), K3) == 30  # (k-1)^n + (-1)^n (k-1)
    assert inj(complete_graph(3), K3) == 6
    assert inj(complete_graph(4), K3) == 0


@given(patterns(max_n=5), weighted_graphs(max_n=5))
def test_strategies_agree(F, G):
    ref = hom(F, G, strategy="brute")
    assert hom(F, G, strategy="dp") == ref
    assert hom(F, G, strategy="sparse") == ref


@given(patterns(max_n=5), weighted_graphs(max_n=6))
def test_backends_agree(F, G):
    a = hom(F, G, strategy="sparse", backend="numpy")
    b = hom(F, G, strategy="sparse", backend="numba")
    assert a == b


def test_numba_flag_selects_numpy(monkeypatch):
    calls = []
    real = _accel.hom_csr_numpy
    monkeypatch.setattr(_accel, "hom_csr_numpy", lambda *a, **k: calls.append(1) or real(*a, **k))
    monkeypatch.setenv("COMMONS_LAB_NUMBA", "0")
    assert not _accel.numba_enabled()
    G2 = build_g2(3)
    assert hom(complete_graph(4), G2, strategy="sparse") == 0
    assert hom(cycle_graph(4), G2, strategy="sparse") == hom(cycle_graph(4), G2, strategy="dp")
    assert calls


def test_numba_flag_default_on(monkeypatch):
    monkeypatch.delenv("COMMONS_LAB_NUMBA", raising=False)
    assert _accel.numba_enabled() == _accel._HAVE_NUMBA


@pytest.mark.parametrize("threads", [2, 3])
def test_threads_are_deterministic(threads):
    G = build_g2(4)
    F = cycle_graph(5)
    ref = hom(F, G)
    assert hom(F, G, strategy="sparse", threads=threads) == ref
    small = build_g2(2)
    assert hom(path_graph(4), small, strategy="brute", threads=threads) == hom(path_graph(4), small, strategy="brute")


@given(weighted_graphs(max_n=6))
def test_hom_k2_is_weight_sum(G):
    total = sum((w if a == b else 2 * w for (a, b), w in G.weights), Fraction(0))
    assert hom(complete_graph(2), G) == total


def test_brute_guard():
    with pytest.raises(GuardExceeded):
        hom(complete_graph(4), build_g2(6), strategy="brute", cfg=DEFAULTS.updated(brute_guard=1000))


def test_dense_budget_guard():
    with pytest.raises(GuardExceeded):
        hom(cycle_graph(4), build_g2(6), strategy="dp", cfg=DEFAULTS.updated(dense_budget=10))


def test_large_weights_fall_back_to_exact_objects():
    G = WeightedGraph.from_edges(2, [(0, 1, 10**12), (0, 0, Fraction(1, 3))], allow_loops=True)
    F = cycle_graph(6)
    assert hom(F, G, strategy="sparse") == hom(F, G, strategy="brute")


def test_empty_pattern_density_is_one():
    assert weighted_hom(PatternGraph(0, ()), build_g1()) == 1


@pytest.mark.parametrize("n", range(2, 7))
def test_spectrum_sums_are_binomial(n):
    for F in all_graphs(n):
        if F.n == n and F.edge_count:
            spec = subgraph_spectrum(F)
            assert spec.check_binomial()


def test_spectrum_examples():
    K4 = complete_graph(4)
    assert sub(cycle_graph(4), K4) == 3
    assert sub(complete_graph(3), K4) == 4
    assert sub(path_graph(3), K4) == 12
    assert sub(complete_graph(2), K4) == 6
    assert sub(PatternGraph(4, ((0, 1), (2, 3))), K4) == 3
    assert sub(complete_graph(4), cycle_graph(4)) == 0


def test_spectrum_cache_roundtrip(tmp_path, monkeypatch):
    monkeypatch.setenv("COMMONS_LAB_CACHE_DIR", str(tmp_path))
    hm._SPECTRA.clear()
    F = cycle_graph(6)
    first = subgraph_spectrum(F)
    files = list(tmp_path.glob("spectrum-*.json"))
    assert len(files) == 1
    obj = json.loads(files[0].read_text())
    assert obj["format"] == "commons-lab/spectrum"
    hm._SPECTRA.clear()
    assert subgraph_spectrum(F) == first


def test_spectrum_cache_disabled(tmp_path, monkeypatch):
    monkeypatch.setenv("COMMONS_LAB_CACHE_DIR", str(tmp_path))
    hm._SPECTRA.clear()
    hm.set_cache_enabled(False)
    spec = subgraph_spectrum(complete_graph(4))
    assert not list(tmp_path.glob("*.json"))
    hm.set_cache_enabled(True)
    assert subgraph_spectrum(complete_graph(4)) == spec


def test_corrupt_cache_file_is_ignored(tmp_path, monkeypatch):
    monkeypatch.setenv("COMMONS_LAB_CACHE_DIR", str(tmp_path))
    hm._SPECTRA.clear()
    spec = subgraph_spectrum(cycle_graph(5))
    for f in tmp_path.glob("*.json"):
        f.write_text("{not json")
    hm._SPECTRA.clear()
    assert subgraph_spectrum(cycle_graph(5)) == spec


def test_spectrum_edge_cap():
    with pytest.raises(GuardExceeded):
        subgraph_spectrum(complete_graph(6), DEFAULTS.updated(spectrum_edge_cap=10))


@settings(max_examples=25)
@given(st.integers(2, 6), st.integers(2, 8))
def test_forest_densities_in_complete_graphs(k, n):
    # t(T, K_n) = ((n-1)/n)^(k-1) for any tree T on k nodes
    Kn = WeightedGraph.from_edges(n, [(i, j, 1) for i in range(n) for j in range(i + 1, n)])
    assert t(path_graph(k), Kn) == Fraction(n - 1, n) ** (k - 1)


def test_spectrum_against_direct_count():
    F = cycle_graph(5)
    P3 = path_graph(3)
    assert sub(P3, F) == 5
    assert sum(e.multiplicity for e in subgraph_spectrum(F).with_edges(2)) == comb(5, 2)

"""Seeded generators for the property suites (patterns, targets, mirror graphs)."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .graphs import PatternGraph, WeightedGraph
from .structure import mirror_glue

WEIGHTS = (Fraction(-1), Fraction(0), Fraction(1), Fraction(1, 2))
EPSILONS = (Fraction(1, 2), Fraction(1, 3), Fraction(1, 5), Fraction(2, 7), Fraction(1))


def rng_for(seed: int, stream: int) -> np.random.Generator:
    """Independent deterministic stream ``stream`` under a base seed."""
    return np.random.default_rng([seed, stream])


def random_pattern(rng: np.random.Generator, min_n: int = 2, max_n: int = 5, p: float = 0.5) -> PatternGraph:
    """Random graph without isolated nodes; retries until at least one edge survives."""
    while True:
        n = int(rng.integers(min_n, max_n + 1))
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        keep = [e for e in pairs if rng.random() < p]
        used = sorted({x for e in keep for x in e})
        if len(used) < 2:
            continue
        return PatternGraph.from_edge_subset(keep)


def random_weighted_graph(rng: np.random.Generator, min_n: int = 1, max_n: int = 7,
                          weights=WEIGHTS, loops: bool = True) -> WeightedGraph:
    n = int(rng.integers(min_n, max_n + 1))
    edges = []
    for i in range(n):
        for j in range(i if loops else i + 1, n):
            w = weights[int(rng.integers(len(weights)))]
            if w != 0:
                edges.append((i, j, w))
    return WeightedGraph.from_edges(n, edges, allow_loops=loops)


def random_mirror_graph(rng: np.random.Generator, max_nodes: int = 8) -> tuple[PatternGraph, frozenset]:
    """Glue two copies of a random graph along a random independent set."""
    while True:
        g = random_pattern(rng, 2, 5)
        order = [int(x) for x in rng.permutation(g.n)]
        S: list[int] = []
        for v in order:
            if rng.random() < 0.5 and not any(g.has_edge(v, s) for s in S):
                S.append(v)
        if 2 * g.n - len(S) > max_nodes:
            continue
        return mirror_glue(g, S), frozenset(S)

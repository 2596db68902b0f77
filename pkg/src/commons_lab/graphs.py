"""Pattern graphs (what is counted) and weighted target graphs (where it is counted).

Both types are immutable. Node labels are ``0..n-1``; edges are stored as
sorted pairs ``(u, v)`` with ``u < v`` (``u <= v`` for weighted loops).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .rational import RationalLike, format_rational, to_rational

MAX_PATTERN_NODES = 12

Edge = tuple[int, int]


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class PatternGraph:
    """Simple unweighted graph ``F``.

    Isolated nodes are rejected unless ``allow_isolated`` is set; the empty
    graph (``n == 0``) is allowed because it heads every subgraph spectrum.
    """

    n: int
    edges: tuple[Edge, ...]
    name: str | None = field(default=None, compare=False)
    allow_isolated: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("node count must be non-negative")
        if self.n > MAX_PATTERN_NODES:
            raise ValueError(f"pattern has {self.n} nodes; cap is {MAX_PATTERN_NODES}")
        clean = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"loop at node {u}; patterns are simple")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge {(u, v)} out of range for n={self.n}")
            e = _norm(u, v)
            if e in clean:
                raise ValueError(f"duplicate edge {e}")
            clean.add(e)
        object.__setattr__(self, "edges", tuple(sorted(clean)))
        if not self.allow_isolated and self.n > 0:
            touched = {x for e in self.edges for x in e}
            if len(touched) != self.n:
                missing = sorted(set(range(self.n)) - touched)
                raise ValueError(f"isolated nodes {missing}; pass allow_isolated=True to keep them")

    # -- basic structure -------------------------------------------------

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[frozenset, ...]:
        adj: list[set] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    @cached_property
    def adjacency_bits(self) -> tuple[int, ...]:
        return tuple(sum(1 << j for j in nb) for nb in self.adjacency)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            stack, comp = [s], []
            while stack:
                x = stack.pop()
                comp.append(x)
                for y in self.adjacency[x]:
                    if not seen[y]:
                        seen[y] = True
                        stack.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def min_degree(self) -> int:
        return min(self.degrees, default=0)

    # -- derived graphs --------------------------------------------------

    def relabel(self, perm: Sequence[int]) -> "PatternGraph":
        """Image under ``i -> perm[i]``."""
        return PatternGraph(
            self.n,
            tuple(_norm(perm[u], perm[v]) for u, v in self.edges),
            allow_isolated=self.allow_isolated,
        )

    def induced_on(self, nodes: Sequence[int]) -> "PatternGraph":
        index = {v: i for i, v in enumerate(nodes)}
        es = tuple((index[u], index[v]) for u, v in self.edges if u in index and v in index)
        return PatternGraph(len(nodes), es, allow_isolated=True)

    @classmethod
    def from_edge_subset(cls, edges: Iterable[Edge]) -> "PatternGraph":
        """Graph spanned by ``edges`` with isolated nodes deleted (compact relabel)."""
        edges = list(edges)
        nodes = sorted({x for e in edges for x in e})
        index = {v: i for i, v in enumerate(nodes)}
        return cls(len(nodes), tuple((index[u], index[v]) for u, v in edges))

    def with_name(self, name: str) -> "PatternGraph":
        return PatternGraph(self.n, self.edges, name=name, allow_isolated=self.allow_isolated)

    def to_weighted(self) -> "WeightedGraph":
        return WeightedGraph.from_edges(self.n, ((u, v, 1) for u, v in self.edges), name=self.name)

    # -- serialization ---------------------------------------------------

    def encode(self) -> str:
        """Compact string ``n:u-v,u-v,...`` of this labelled graph."""
        return f"{self.n}:" + ",".join(f"{u}-{v}" for u, v in self.edges)

    @classmethod
    def decode(cls, text: str, allow_isolated: bool = False) -> "PatternGraph":
        n_str, _, rest = text.partition(":")
        edges = [tuple(int(x) for x in part.split("-")) for part in rest.split(",") if part]
        return cls(int(n_str), tuple(edges), allow_isolated=allow_isolated)

    def to_json_obj(self) -> dict:
        return {
            "kind": "pattern",
            "n": self.n,
            "edges": [[u, v] for u, v in self.edges],
            "allow_loops": False,
        }

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"PatternGraph{label}(n={self.n}, edges={list(self.edges)})"


@dataclass(frozen=True)
class WeightedGraph:
    """Finite graph with rational edge weights; loops optional.

    Weights live on unordered pairs, so symmetry is structural. Zero weights
    are dropped: an absent pair has weight 0.
    """

    n: int
    weights: tuple[tuple[Edge, Fraction], ...]
    allow_loops: bool = False
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("weighted graph needs at least one node")
        clean: dict[Edge, Fraction] = {}
        for (u, v), w in self.weights:
            u, v = int(u), int(v)
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"pair {(u, v)} out of range for n={self.n}")
            if u == v and not self.allow_loops:
                raise ValueError(f"loop at {u} but allow_loops is False")
            e = _norm(u, v)
            if e in clean:
                raise ValueError(f"duplicate pair {e}")
            w = to_rational(w)
            if w != 0:
                clean[e] = w
        object.__setattr__(self, "weights", tuple(sorted(clean.items())))

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int, RationalLike]],
        allow_loops: bool = False,
        name: str | None = None,
    ) -> "WeightedGraph":
        return cls(n, tuple(((u, v), w) for u, v, w in edges), allow_loops=allow_loops, name=name)

    @classmethod
    def from_mapping(cls, n: int, mapping: Mapping[Edge, RationalLike], **kw) -> "WeightedGraph":
        return cls(n, tuple(mapping.items()), **kw)

    @cached_property
    def weight_map(self) -> dict[Edge, Fraction]:
        return dict(self.weights)

    def weight(self, u: int, v: int) -> Fraction:
        return self.weight_map.get(_norm(u, v), Fraction(0))

    @property
    def has_loops(self) -> bool:
        return any(u == v for (u, v), _ in self.weights)

    def is_pm1(self) -> bool:
        """True iff every present weight is -1 or +1."""
        return all(abs(w) == 1 for _, w in self.weights)

    def weighted_degree(self, v: int) -> Fraction:
        return sum((w for (a, b), w in self.weights if v in (a, b)), Fraction(0))

    def is_balanced(self) -> bool:
        """Every node's incident weights (a loop counted once) sum to zero."""
        sums = [Fraction(0)] * self.n
        for (u, v), w in self.weights:
            sums[u] += w
            if u != v:
                sums[v] += w
        return all(s == 0 for s in sums)

    def to_json_obj(self) -> dict:
        return {
            "kind": "weighted",
            "n": self.n,
            "edges": [[u, v, format_rational(w)] for (u, v), w in self.weights],
            "allow_loops": self.allow_loops,
        }

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"WeightedGraph{label}(n={self.n}, pairs={len(self.weights)}, loops={self.has_loops})"


# -- JSON --------------------------------------------------------------------


def dumps_graph(graph: PatternGraph | WeightedGraph) -> str:
    return json.dumps(graph.to_json_obj(), separators=(",", ":"))


def graph_from_json_obj(obj: Mapping) -> PatternGraph | WeightedGraph:
    kind = obj.get("kind")
    if kind == "pattern":
        if obj.get("allow_loops"):
            raise ValueError("pattern graphs cannot carry loops")
        return PatternGraph(int(obj["n"]), tuple((int(u), int(v)) for u, v, *_ in obj["edges"]))
    if kind == "weighted":
        edges = []
        for e in obj["edges"]:
            if len(e) == 2:
                edges.append((int(e[0]), int(e[1]), 1))
            else:
                edges.append((int(e[0]), int(e[1]), to_rational(e[2])))
        return WeightedGraph.from_edges(int(obj["n"]), edges, allow_loops=bool(obj.get("allow_loops", False)))
    raise ValueError(f"unknown graph kind {kind!r}")


def loads_graph(text: str) -> PatternGraph | WeightedGraph:
    return graph_from_json_obj(json.loads(text))


# -- named patterns ----------------------------------------------------------


def complete_graph(n: int) -> PatternGraph:
    return PatternGraph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)), name=f"K{n}")


def cycle_graph(n: int) -> PatternGraph:
    if n < 3:
        raise ValueError("cycles need at least 3 nodes")
    return PatternGraph(n, tuple((i, (i + 1) % n) for i in range(n)), name=f"C{n}")


def path_graph(n: int) -> PatternGraph:
    """Path on ``n`` nodes (``P3`` is the 2-edge path)."""
    if n < 2:
        raise ValueError("paths need at least 2 nodes")
    return PatternGraph(n, tuple((i, i + 1) for i in range(n - 1)), name=f"P{n}")


def star_graph(leaves: int) -> PatternGraph:
    return PatternGraph(leaves + 1, tuple((0, i) for i in range(1, leaves + 1)), name=f"S{leaves}")


def matching_graph(k: int) -> PatternGraph:
    return PatternGraph(2 * k, tuple((2 * i, 2 * i + 1) for i in range(k)), name=f"{k}K2")


def paw_graph() -> PatternGraph:
    return PatternGraph(4, ((0, 1), (1, 2), (0, 2), (2, 3)), name="paw")


def empty_pattern() -> PatternGraph:
    return PatternGraph(0, (), name="empty")


def complete_weighted(n: int) -> WeightedGraph:
    """``K_n`` with 0/1 weights and no loops."""
    return WeightedGraph.from_edges(n, ((i, j, 1) for i in range(n) for j in range(i + 1, n)), name=f"K{n}")


def named_pattern(name: str) -> PatternGraph:
    """Parse names like ``k4``, ``c5``, ``p3``, ``2k2``, ``s3``, ``paw``, ``pentagon-triangle``."""
    key = name.strip().lower()
    if key in ("paw",):
        return paw_graph()
    if key in ("pentagon-triangle", "triangle-pentagon", "tp"):
        from .constructions import build_pentagon_triangle

        return build_pentagon_triangle()
    if key.endswith("k2") and key[:-2].isdigit():
        return matching_graph(int(key[:-2]))
    prefix, digits = key[:1], key[1:]
    if digits.isdigit():
        k = int(digits)
        if prefix == "k":
            return complete_graph(k)
        if prefix == "c":
            return cycle_graph(k)
        if prefix == "p":
            return path_graph(k)
        if prefix == "s":
            return star_graph(k)
    raise ValueError(f"unknown pattern name {name!r}")

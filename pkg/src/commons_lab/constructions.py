"""Explicit weighted graphs behind the K4 and triangle-pentagon results.

* ``build_g1``: K4 with unit edges and a ``-1`` loop at every node.
* ``build_g2(n)``: ``K_n x G1`` (categorical product).
* ``build_g3(G2, H)``: copies of ``G2`` glued on the hyperedges ``A_i`` and
  negated copies on ``B_i`` of a linear r-partite hypergraph; balanced.
* ``build_prop43_graph(k)``: star, triangle edge and ``c``-``d`` paths whose
  weighting is balanced and makes the triangle-pentagon density negative.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .config import DEFAULTS, Config
from .graphs import PatternGraph, WeightedGraph, complete_graph, complete_weighted, cycle_graph
from .homomorphism import t
from .kernels import categorical_product

C4 = cycle_graph(4)
K4 = complete_graph(4)

# First n with t(C4,K_n x G1) + t(K4,K_n x G1) <= -1/5, found by ``minimal_n``.
MINIMAL_N = 38
MINIMAL_N_VALUE = Fraction(-43919, 219488)


# -- G1 and G2 ---------------------------------------------------------------


def build_g1() -> WeightedGraph:
    edges = [(i, j, 1) for i in range(4) for j in range(i + 1, 4)]
    edges += [(i, i, -1) for i in range(4)]
    return WeightedGraph.from_edges(4, edges, allow_loops=True, name="G1")


def build_g2(n: int, cfg: Config = DEFAULTS) -> WeightedGraph:
    if n < 2:
        raise ValueError("n must be at least 2")
    g = categorical_product(complete_weighted(n), build_g1(), cfg)
    return WeightedGraph(g.n, g.weights, allow_loops=False, name=f"K{n}xG1")


def g2_density_sum(n: int, cfg: Config = DEFAULTS) -> Fraction:
    """``t(C4,G2) + t(K4,G2)`` through multiplicativity (``G2`` is never built)."""
    Kn, G1 = complete_weighted(n), build_g1()
    return t(C4, Kn, cfg=cfg) * t(C4, G1, cfg=cfg) + t(K4, Kn, cfg=cfg) * t(K4, G1, cfg=cfg)


def minimal_n(threshold: Fraction = Fraction(-1, 5), limit: int = 500, cfg: Config = DEFAULTS):
    """Scan ``n = 2, 3, ...`` for the first ``g2_density_sum(n) <= threshold``."""
    for n in range(2, limit + 1):
        s = g2_density_sum(n, cfg)
        if s <= threshold:
            return n, s
    return None


# -- bipartite sources -------------------------------------------------------


@dataclass(frozen=True)
class BipartiteGraph:
    """Bipartite graph with left nodes ``0..N-1`` and right nodes ``0..M-1``."""

    left: int
    right: int
    edges: tuple[tuple[int, int], ...]
    description: str = ""

    def __post_init__(self):
        seen = set()
        for x, y in self.edges:
            if not (0 <= x < self.left and 0 <= y < self.right):
                raise ValueError(f"edge {(x, y)} out of range")
            if (x, y) in seen:
                raise ValueError(f"parallel edge {(x, y)}")
            seen.add((x, y))

    def degrees(self) -> tuple[list[int], list[int]]:
        dl, dr = [0] * self.left, [0] * self.right
        for x, y in self.edges:
            dl[x] += 1
            dr[y] += 1
        return dl, dr

    def regular_degree(self) -> int | None:
        dl, dr = self.degrees()
        ds = set(dl) | set(dr)
        return ds.pop() if len(ds) == 1 else None

    def girth(self) -> int | None:
        """Shortest cycle length (BFS from every node); ``None`` for a forest."""
        n = self.left + self.right
        adj = [[] for _ in range(n)]
        for x, y in self.edges:
            adj[x].append(self.left + y)
            adj[self.left + y].append(x)
        best = None
        for s in range(n):
            dist = [-1] * n
            parent = [-1] * n
            dist[s] = 0
            q = deque([s])
            while q:
                v = q.popleft()
                if best is not None and 2 * dist[v] + 1 >= best:
                    break
                for w in adj[v]:
                    if dist[w] == -1:
                        dist[w] = dist[v] + 1
                        parent[w] = v
                        q.append(w)
                    elif parent[v] != w:
                        c = dist[v] + dist[w] + 1
                        if best is None or c < best:
                            best = c
        return best


def projective_plane_incidence(q: int) -> BipartiteGraph:
    """Point-line incidence graph of PG(2, q) for prime ``q``: (q+1)-regular, girth 6."""
    if q < 2 or any(q % p == 0 for p in range(2, int(q**0.5) + 1)):
        raise ValueError("q must be prime")
    pts = []
    for a in range(q):
        for b in range(q):
            pts.append((1, a, b))
    for b in range(q):
        pts.append((0, 1, b))
    pts.append((0, 0, 1))
    P = np.array(pts, dtype=np.int64)
    inc = (P @ P.T) % q == 0  # lines use the same coordinates as points
    edges = [(int(pi), int(li)) for pi, li in zip(*np.nonzero(inc))]
    return BipartiteGraph(len(pts), len(pts), tuple(sorted(edges)), f"PG(2,{q}) incidence")


def fano_incidence() -> BipartiteGraph:
    return projective_plane_incidence(2)


def heawood_graph() -> BipartiteGraph:
    """The Heawood graph from its LCF notation [5,-5]^7, split into even/odd sides."""
    n = 14
    edges = set()
    for i in range(n):
        edges.add(tuple(sorted((i, (i + 1) % n))))
        jump = 5 if i % 2 == 0 else -5
        edges.add(tuple(sorted((i, (i + jump) % n))))
    bip = []
    for u, v in edges:
        x, y = (u, v) if u % 2 == 0 else (v, u)
        bip.append((x // 2, y // 2))
    return BipartiteGraph(7, 7, tuple(sorted(bip)), "Heawood graph")


def random_regular_bipartite(N: int, r: int, seed: int, min_girth: int = 6, retries: int = 2000) -> BipartiteGraph:
    """Union of ``r`` random perfect matchings; redrawn until simple with girth >= ``min_girth``."""
    if r > N:
        raise ValueError("degree exceeds side size")
    rng = np.random.default_rng(seed)
    for _ in range(retries):
        edges = set()
        ok = True
        for _ in range(r):
            perm = rng.permutation(N)
            for x in range(N):
                e = (x, int(perm[x]))
                if e in edges:
                    ok = False
                    break
                edges.add(e)
            if not ok:
                break
        if not ok:
            continue
        g = BipartiteGraph(N, N, tuple(sorted(edges)), f"random {r}-regular bipartite (N={N}, seed={seed})")
        girth = g.girth()
        if girth is None or girth >= min_girth:
            return g
    raise RuntimeError(f"no {r}-regular bipartite graph with girth >= {min_girth} in {retries} draws")


def bipartite_edge_coloring(g: BipartiteGraph) -> list[int]:
    """Proper edge colouring with max-degree colours by alternating-path swaps."""
    delta = max(max(g.degrees()[0], default=0), max(g.degrees()[1], default=0))
    # at[side][node][colour] -> edge index or -1
    at_l = [[-1] * delta for _ in range(g.left)]
    at_r = [[-1] * delta for _ in range(g.right)]
    colour = [-1] * len(g.edges)
    for idx, (x, y) in enumerate(g.edges):
        a = next(c for c in range(delta) if at_l[x][c] == -1)
        b = next(c for c in range(delta) if at_r[y][c] == -1)
        if at_r[y][a] != -1:
            # walk the a/b path from y and swap its colours; it cannot reach x
            path = []
            node, side, c = y, "r", a
            while True:
                table = at_r if side == "r" else at_l
                e = table[node][c]
                if e == -1:
                    break
                path.append(e)
                ex, ey = g.edges[e]
                node, side = (ex, "l") if side == "r" else (ey, "r")
                c = b if c == a else a
            for e in path:
                ex, ey = g.edges[e]
                at_l[ex][colour[e]] = -1
                at_r[ey][colour[e]] = -1
            for e in path:
                ex, ey = g.edges[e]
                colour[e] = b if colour[e] == a else a
                at_l[ex][colour[e]] = e
                at_r[ey][colour[e]] = e
        colour[idx] = a
        at_l[x][a] = idx
        at_r[y][a] = idx
    return colour


def regular_subgraph(g: BipartiteGraph, r: int) -> BipartiteGraph:
    """Keep ``r`` colour classes of a proper edge colouring of a regular graph.

    The result is r-regular and its girth is at least that of ``g``.
    """
    d = g.regular_degree()
    if d is None or not (1 <= r <= d):
        raise ValueError(f"need a regular source of degree >= {r}")
    colour = bipartite_edge_coloring(g)
    edges = tuple(e for e, c in zip(g.edges, colour) if c < r)
    return BipartiteGraph(g.left, g.right, edges, f"{r}-regular part of {g.description}")


# -- glue hypergraph ---------------------------------------------------------


@dataclass(frozen=True)
class GlueHypergraph:
    """r-uniform r-partite linear hypergraph with two partitions into hyperedges."""

    classes: tuple[tuple[int, ...], ...]
    A: tuple[tuple[int, ...], ...]
    B: tuple[tuple[int, ...], ...]
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        self.validate()

    @property
    def r(self) -> int:
        return len(self.classes)

    @property
    def N(self) -> int:
        return len(self.A)

    @property
    def vertex_count(self) -> int:
        return sum(len(c) for c in self.classes)

    def class_of(self) -> list[int]:
        out = [-1] * self.vertex_count
        for u, cls in enumerate(self.classes):
            for v in cls:
                out[v] = u
        return out

    def validate(self) -> None:
        n = self.vertex_count
        flat = sorted(v for c in self.classes for v in c)
        if flat != list(range(n)):
            raise ValueError("classes must partition 0..n-1")
        cls = self.class_of()
        for name, fam in (("A", self.A), ("B", self.B)):
            if sorted(v for e in fam for v in e) != list(range(n)):
                raise ValueError(f"hyperedges {name} do not partition the vertices")
            for e in fam:
                if sorted(cls[v] for v in e) != list(range(self.r)):
                    raise ValueError(f"hyperedge {e} does not meet every class exactly once")
        seen: dict[tuple[int, int], int] = {}
        for i, e in enumerate(self.A + self.B):
            for a in range(len(e)):
                for b in range(a + 1, len(e)):
                    key = (min(e[a], e[b]), max(e[a], e[b]))
                    if key in seen:
                        raise ValueError(f"hyperedges {seen[key]} and {i} share two vertices (not linear)")
                    seen[key] = i

    def vertex_at(self, edge: Sequence[int], u: int, cls: Sequence[int]) -> int:
        for v in edge:
            if cls[v] == u:
                return v
        raise KeyError(u)

    def to_json_obj(self) -> dict:
        obj = {"classes": [list(c) for c in self.classes], "A": [list(e) for e in self.A],
               "B": [list(e) for e in self.B]}
        if self.provenance:
            obj["provenance"] = self.provenance
        return obj

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "GlueHypergraph":
        return cls(
            tuple(tuple(c) for c in obj["classes"]),
            tuple(tuple(e) for e in obj["A"]),
            tuple(tuple(e) for e in obj["B"]),
            dict(obj.get("provenance", {})),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))


def dual_hypergraph(g: BipartiteGraph, coloring: Sequence[int] | None = None, min_girth: int = 5) -> GlueHypergraph:
    """Vertices are the edges of ``g``; ``A_x`` / ``B_y`` collect the edges at each node."""
    r = g.regular_degree()
    if r is None or g.left != g.right:
        raise ValueError("source graph must be regular with equal sides")
    girth = g.girth()
    if girth is not None and girth < min_girth:
        raise ValueError(f"source girth {girth} < {min_girth}")
    colour = list(coloring) if coloring is not None else bipartite_edge_coloring(g)
    if len(colour) != len(g.edges) or any(not (0 <= c < r) for c in colour):
        raise ValueError("colouring must assign one of r colours to each edge")
    A = [[] for _ in range(g.left)]
    B = [[] for _ in range(g.right)]
    for idx, (x, y) in enumerate(g.edges):
        A[x].append(idx)
        B[y].append(idx)
    for fam in (A, B):
        for e in fam:
            if len({colour[i] for i in e}) != len(e):
                raise ValueError("colouring is not proper")
    classes = [[] for _ in range(r)]
    for idx, c in enumerate(colour):
        classes[c].append(idx)
    prov = {"source": g.description, "N": g.left, "r": r, "source_girth": girth if girth is not None else "inf"}
    return GlueHypergraph(
        tuple(tuple(c) for c in classes),
        tuple(tuple(e) for e in A),
        tuple(tuple(e) for e in B),
        prov,
    )


def build_g3(G2: WeightedGraph, H: GlueHypergraph) -> WeightedGraph:
    """``G2`` on every ``A_i`` (node ``u`` on the class-``u`` vertex), ``-G2`` on every ``B_i``."""
    if G2.has_loops:
        raise ValueError("G2 must be loop-free")
    if G2.n != H.r:
        raise ValueError(f"G2 has {G2.n} nodes but the hypergraph is {H.r}-uniform")
    cls = H.class_of()
    weights: dict[tuple[int, int], Fraction] = {}
    for sign, fam in ((1, H.A), (-1, H.B)):
        for e in fam:
            pos = {cls[v]: v for v in e}
            for (u, w), x in G2.weights:
                a, b = pos[u], pos[w]
                key = (a, b) if a < b else (b, a)
                if key in weights:
                    raise ValueError(f"pair {key} is covered by two hyperedges")
                weights[key] = sign * x
    return WeightedGraph(H.vertex_count, tuple(weights.items()), name="G3")


def g3_density_bound(n: int, N: int, r: int, cfg: Config = DEFAULTS) -> Fraction:
    """``(2/N^3)(t(C4,G2) + t(K4,G2) + 1/r)``, the upper estimate for ``t(C4,G3)+t(K4,G3)``."""
    if r != 4 * n:
        raise ValueError(f"r must equal 4n (got r={r}, n={n})")
    if N < 1:
        raise ValueError("N must be positive")
    return Fraction(2, N**3) * (g2_density_sum(n, cfg) + Fraction(1, r))


def g3_densities(G2: WeightedGraph, N: int, cfg: Config = DEFAULTS) -> tuple[Fraction, Fraction]:
    """Exact ``(t(C4,G3), t(K4,G3))`` for a source of girth at least 6.

    Closed 4-walks of ``G3`` either stay in one copy or go out and back
    along two copies meeting at a vertex, which gives
    ``hom(C4,G3) = 2N hom(C4,G2) + 4N sum_u s(u)^2`` with ``s(u)`` the sum of
    squared weights at ``u``; 4-cliques always lie in one copy.
    """
    r = G2.n
    s = [Fraction(0)] * r
    for (u, v), w in G2.weights:
        s[u] += w * w
        s[v] += w * w
    hom_c4 = t(C4, G2, cfg=cfg) * r**4
    hom_k4 = t(K4, G2, cfg=cfg) * r**4
    total = (r * N) ** 4
    c4 = (2 * N * hom_c4 + 4 * N * sum(x * x for x in s)) / total
    return c4, 2 * N * hom_k4 / total


def g3_densities_from_n(n: int, N: int, cfg: Config = DEFAULTS) -> tuple[Fraction, Fraction]:
    """Same as ``g3_densities(build_g2(n), N)`` without building ``G2``.

    Every node of ``K_n x G1`` has ``4(n-1)`` unit-weight neighbours.
    """
    Kn, G1 = complete_weighted(n), build_g1()
    r = 4 * n
    c4_g2 = t(C4, Kn, cfg=cfg) * t(C4, G1, cfg=cfg)
    k4_g2 = t(K4, Kn, cfg=cfg) * t(K4, G1, cfg=cfg)
    corr = Fraction(4 * r * (4 * (n - 1)) ** 2, r**4)
    scale = Fraction(2, N**3)
    return scale * (c4_g2 + corr / 2), scale * k4_g2


# -- triangle-pentagon pair --------------------------------------------------


def build_pentagon_triangle() -> PatternGraph:
    """A triangle and a pentagon sharing node 0."""
    edges = ((0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (4, 5), (5, 6), (0, 6))
    return PatternGraph(7, edges, name="pentagon-triangle")


PROP43_NODES = ("v", "a", "b", "c", "d")


def build_prop43_graph(k: int, flip_r_paths: bool = False) -> WeightedGraph:
    """Star ``v-{a,b,c,d}``, edge ``ab``, ``k`` paths of length 3 and ``k+1`` of length 5 from ``c`` to ``d``.

    Negative edges: ``va``, ``vb``, the middle edge of each short path, and
    edges 1, 3, 5 of each long path counted from ``c`` (``flip_r_paths``
    negates edges 2, 4 instead).
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    v, a, b, c, d = range(5)
    edges = [(v, a, -1), (v, b, -1), (v, c, 1), (v, d, 1), (a, b, 1)]
    nxt = 5
    for _ in range(k):
        q1, q2 = nxt, nxt + 1
        nxt += 2
        edges += [(c, q1, 1), (q1, q2, -1), (q2, d, 1)]
    for _ in range(k + 1):
        path = [c, nxt, nxt + 1, nxt + 2, nxt + 3, d]
        nxt += 4
        for i in range(5):
            w = -1 if i % 2 == 0 else 1
            edges.append((path[i], path[i + 1], -w if flip_r_paths else w))
    return WeightedGraph.from_edges(nxt, edges, name=f"G_{k}")


def prop43_graph_balanced(k: int) -> tuple[WeightedGraph, str]:
    """The balanced orientation of the long-path signs, with the choice made."""
    g = build_prop43_graph(k)
    if g.is_balanced():
        return g, "long paths: edges 1,3,5 from c negative"
    g = build_prop43_graph(k, flip_r_paths=True)
    if g.is_balanced():
        return g, "long paths: edges 2,4 from c negative"
    raise ValueError("neither sign orientation is balanced")

"""Structural analysis of pattern graphs: cycles, girth, blocks, odd-cycle
pairs and mirror symmetry. Everything here is exhaustive over the node cap."""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from itertools import combinations
from typing import Iterator, Sequence

from .canon import automorphism_count, canonical_form
from .config import DEFAULTS, Config, GuardExceeded
from .graphs import PatternGraph


@total_ordering
class Unbounded:
    """Length of a cycle that does not exist; compares above every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return isinstance(other, Unbounded)

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return not isinstance(other, Unbounded)

    def __hash__(self):
        return hash("unbounded")

    def __repr__(self):
        return "INFINITE"

    def __str__(self):
        return "inf"


INFINITE = Unbounded()


def length_to_json(x) -> int | str:
    return "inf" if x is INFINITE else int(x)


def check_cap(F: PatternGraph, cfg: Config = DEFAULTS) -> None:
    if F.n > cfg.node_cap:
        raise GuardExceeded(f"pattern has {F.n} nodes; node cap is {cfg.node_cap}")


# -- cycles ------------------------------------------------------------------


def simple_cycles(F: PatternGraph) -> Iterator[tuple[int, ...]]:
    """Every simple cycle once, as a node tuple starting at its smallest node."""
    adj = F.adjacency
    for s in range(F.n):
        path = [s]
        on_path = {s}

        def walk(v):
            for w in adj[v]:
                if w == s and len(path) >= 3 and path[1] < path[-1]:
                    yield tuple(path)
                elif w > s and w not in on_path:
                    path.append(w)
                    on_path.add(w)
                    yield from walk(w)
                    path.pop()
                    on_path.discard(w)

        yield from walk(s)


def blocks(F: PatternGraph) -> list[frozenset]:
    """Node sets of the blocks (maximal 2-connected pieces and bridges)."""
    adj = F.adjacency
    disc = [-1] * F.n
    low = [0] * F.n
    out: list[frozenset] = []
    counter = [0]
    edge_stack: list[tuple[int, int]] = []

    def dfs(v, parent):
        disc[v] = low[v] = counter[0]
        counter[0] += 1
        for w in sorted(adj[v]):
            if disc[w] == -1:
                edge_stack.append((v, w))
                dfs(w, v)
                low[v] = min(low[v], low[w])
                if low[w] >= disc[v]:
                    comp = set()
                    while True:
                        a, b = edge_stack.pop()
                        comp.update((a, b))
                        if (a, b) == (v, w):
                            break
                    out.append(frozenset(comp))
            elif w != parent and disc[w] < disc[v]:
                edge_stack.append((v, w))
                low[v] = min(low[v], disc[w])

    for v in range(F.n):
        if disc[v] == -1 and adj[v]:
            dfs(v, -1)
    return sorted(out, key=lambda b: (len(b), sorted(b)))


def is_bipartite(F: PatternGraph) -> bool:
    side = [-1] * F.n
    for s in range(F.n):
        if side[s] != -1:
            continue
        side[s] = 0
        stack = [s]
        while stack:
            v = stack.pop()
            for w in F.adjacency[v]:
                if side[w] == -1:
                    side[w] = 1 - side[v]
                    stack.append(w)
                elif side[w] == side[v]:
                    return False
    return True


def is_forest(F: PatternGraph) -> bool:
    return F.edge_count == F.n - len(F.components())


@dataclass(frozen=True)
class OddCyclePair:
    g1: int
    g2: int
    shared_node_count: int
    cycle1: tuple[int, ...]
    cycle2: tuple[int, ...]


@dataclass(frozen=True)
class StructureReport:
    girth: int | Unbounded
    even_girth: int | Unbounded
    blocks: tuple[frozenset, ...]
    odd_cycle_pair: OddCyclePair | None
    is_bipartite: bool
    is_forest: bool
    cycle_lengths: tuple[int, ...]

    def to_json_obj(self) -> dict:
        pair = None
        if self.odd_cycle_pair is not None:
            p = self.odd_cycle_pair
            pair = {"g1": p.g1, "g2": p.g2, "shared": p.shared_node_count,
                    "cycle1": list(p.cycle1), "cycle2": list(p.cycle2)}
        return {
            "girth": length_to_json(self.girth),
            "even_girth": length_to_json(self.even_girth),
            "blocks": [sorted(b) for b in self.blocks],
            "odd_cycle_pair": pair,
            "is_bipartite": self.is_bipartite,
            "is_forest": self.is_forest,
            "cycle_lengths": list(self.cycle_lengths),
        }


def _best_odd_pair(odd: list[tuple[int, ...]]) -> OddCyclePair | None:
    odd = sorted(odd, key=lambda c: (len(c), c))
    sets = [frozenset(c) for c in odd]
    best = None
    best_key = None
    for i in range(len(odd)):
        li = len(odd[i])
        if best_key is not None and 2 * li > best_key[0]:
            break
        for j in range(i + 1, len(odd)):
            lj = len(odd[j])
            key = (li + lj, li)
            if best_key is not None and key >= best_key:
                break
            shared = len(sets[i] & sets[j])
            if shared <= 1:
                best_key = key
                best = OddCyclePair(li, lj, shared, odd[i], odd[j])
                break
    return best


def analyze_structure(F: PatternGraph, cfg: Config = DEFAULTS) -> StructureReport:
    check_cap(F, cfg)
    cycles = list(simple_cycles(F))
    lengths = sorted({len(c) for c in cycles})
    girth = lengths[0] if lengths else INFINITE
    evens = [x for x in lengths if x % 2 == 0]
    even_girth = evens[0] if evens else INFINITE
    odd = [c for c in cycles if len(c) % 2 == 1]
    return StructureReport(
        girth=girth,
        even_girth=even_girth,
        blocks=tuple(blocks(F)),
        odd_cycle_pair=_best_odd_pair(odd),
        is_bipartite=not odd,
        is_forest=not cycles,
        cycle_lengths=tuple(lengths),
    )


# -- mirror symmetry ---------------------------------------------------------


@dataclass(frozen=True)
class MirrorWitness:
    sigma: tuple[int, ...]
    glue_set: frozenset
    half: frozenset  # one side of F - S; sigma maps it onto the other


def mirror_glue(G: PatternGraph, S: Sequence[int]) -> PatternGraph:
    """Two copies of ``G`` glued along the independent set ``S``."""
    S = set(S)
    for u, v in G.edges:
        if u in S and v in S:
            raise ValueError("glue set must be independent")
    others = [v for v in range(G.n) if v not in S]
    copy = {v: G.n + i for i, v in enumerate(others)}
    edges = list(G.edges)
    for u, v in G.edges:
        edges.append((copy.get(u, u), copy.get(v, v)))
    return PatternGraph(G.n + len(others), tuple(edges), allow_isolated=G.allow_isolated)


def verify_mirror_witness(F: PatternGraph, w: MirrorWitness) -> bool:
    sigma = w.sigma
    n = F.n
    if sorted(sigma) != list(range(n)) or any(sigma[sigma[v]] != v for v in range(n)):
        return False
    edges = set(F.edges)
    if {tuple(sorted((sigma[u], sigma[v]))) for u, v in edges} != edges:
        return False
    S = w.glue_set
    if S != frozenset(v for v in range(n) if sigma[v] == v):
        return False
    if any(u in S and v in S for u, v in edges):
        return False
    X = w.half
    Y = frozenset(sigma[v] for v in X)
    if X & Y or X & S or (X | Y | S) != frozenset(range(n)):
        return False
    return not any((u in X and v in Y) or (u in Y and v in X) for u, v in edges)


def _involutions(F: PatternGraph) -> Iterator[tuple[int, ...]]:
    n = F.n
    adj = F.adjacency
    deg = F.degrees
    sigma = [-1] * n

    def consistent(v, w) -> bool:
        if v == w:
            if any(sigma[x] == x for x in adj[v] if sigma[x] != -1):
                return False
        elif w in adj[v]:
            return False
        for x in range(n):
            sx = sigma[x]
            if sx == -1:
                continue
            if (x in adj[v]) != (sx in adj[w]):
                return False
            if v != w and (x in adj[w]) != (sx in adj[v]):
                return False
        return True

    def extend(v):
        while v < n and sigma[v] != -1:
            v += 1
        if v == n:
            yield tuple(sigma)
            return
        for w in range(v, n):
            if sigma[w] != -1 or deg[w] != deg[v] or not consistent(v, w):
                continue
            sigma[v], sigma[w] = w, v
            yield from extend(v + 1)
            sigma[v] = sigma[w] = -1

    yield from extend(0)


def is_mirror_symmetric(F: PatternGraph, cfg: Config = DEFAULTS) -> MirrorWitness | None:
    """Search involutive automorphisms for a glue witness; verified before return."""
    check_cap(F, cfg)
    for sigma in _involutions(F):
        S = frozenset(v for v in range(F.n) if sigma[v] == v)
        rest = [v for v in range(F.n) if v not in S]
        if not rest:
            if F.edge_count == 0:
                w = MirrorWitness(sigma, S, frozenset())
                if verify_mirror_witness(F, w):
                    return w
            continue
        sub = F.induced_on(rest)
        comps = [frozenset(rest[i] for i in comp) for comp in sub.components()]
        half: set[int] = set()
        ok = True
        for comp in comps:
            image = frozenset(sigma[v] for v in comp)
            if image == comp:
                ok = False
                break
            if min(comp) < min(image):
                half |= comp
        if not ok:
            continue
        w = MirrorWitness(sigma, S, frozenset(half))
        if verify_mirror_witness(F, w):
            return w
    return None


# -- enumeration of small graphs --------------------------------------------


def all_graphs(n: int) -> list[PatternGraph]:
    """One representative per isomorphism class on exactly ``n`` nodes."""
    if n == 0:
        return [PatternGraph(0, ())]
    level = {"1:": PatternGraph(1, (), allow_isolated=True)}
    for k in range(1, n):
        nxt: dict[str, PatternGraph] = {}
        for g in level.values():
            for r in range(k + 1):
                for nbrs in combinations(range(k), r):
                    h = canonical_form(
                        PatternGraph(k + 1, g.edges + tuple((u, k) for u in nbrs), allow_isolated=True)
                    )
                    nxt.setdefault(h.encode(), h)
        level = nxt
    return sorted(level.values(), key=lambda g: (g.edge_count, g.edges))


def graphs_without_isolated(max_n: int) -> list[PatternGraph]:
    out = []
    for n in range(2, max_n + 1):
        for g in all_graphs(n):
            if g.min_degree() > 0:
                out.append(PatternGraph(g.n, g.edges))
    return out


__all__ = [
    "INFINITE",
    "MirrorWitness",
    "OddCyclePair",
    "StructureReport",
    "Unbounded",
    "all_graphs",
    "analyze_structure",
    "automorphism_count",
    "blocks",
    "graphs_without_isolated",
    "is_bipartite",
    "is_forest",
    "is_mirror_symmetric",
    "mirror_glue",
    "simple_cycles",
    "verify_mirror_witness",
]

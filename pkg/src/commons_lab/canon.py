"""Canonical labelling and automorphism counting for small pattern graphs.

Colour refinement followed by individualisation on the first non-singleton
cell. The canonical form is the lexicographically smallest edge list over all
leaves of the search tree. Automorphism groups are counted with the
orbit-stabiliser chain instead of enumerating the group.
"""

from __future__ import annotations

from functools import lru_cache

from .graphs import PatternGraph


def _refine(adj: tuple[tuple[int, ...], ...], colors: tuple[int, ...]) -> tuple[int, ...]:
    """Equitable refinement; colour values are ranks, so the result is canonical."""
    ncells = len(set(colors))
    while True:
        sigs = [(colors[v], tuple(sorted(colors[u] for u in adj[v]))) for v in range(len(adj))]
        order = sorted(set(sigs))
        rank = {s: i for i, s in enumerate(order)}
        new = tuple(rank[s] for s in sigs)
        if len(order) == ncells:
            return new
        colors, ncells = new, len(order)


def _individualize(colors: tuple[int, ...], v: int) -> tuple[int, ...]:
    keys = [2 * c + (0 if w == v else 1) for w, c in enumerate(colors)]
    order = sorted(set(keys))
    rank = {k: i for i, k in enumerate(order)}
    return tuple(rank[k] for k in keys)


def _target_cell(colors: tuple[int, ...]) -> list[int] | None:
    cells: dict[int, list[int]] = {}
    for v, c in enumerate(colors):
        cells.setdefault(c, []).append(v)
    for c in sorted(cells):
        if len(cells[c]) > 1:
            return cells[c]
    return None


def _adj_lists(g: PatternGraph) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(sorted(a)) for a in g.adjacency)


def _initial_colors(g: PatternGraph) -> tuple[int, ...]:
    degs = g.degrees
    order = sorted(set(degs))
    rank = {d: i for i, d in enumerate(order)}
    return tuple(rank[d] for d in degs)


def _leaf_code(edges, colors) -> tuple:
    return tuple(sorted((min(colors[u], colors[v]), max(colors[u], colors[v])) for u, v in edges))


@lru_cache(maxsize=200_000)
def _canonical_edges(n: int, edges: tuple) -> tuple:
    g = PatternGraph(n, edges, allow_isolated=True)
    adj = _adj_lists(g)
    best = None
    stack = [_refine(adj, _initial_colors(g))]
    while stack:
        colors = stack.pop()
        cell = _target_cell(colors)
        if cell is None:
            code = _leaf_code(g.edges, colors)
            if best is None or code < best:
                best = code
            continue
        for v in reversed(cell):
            stack.append(_refine(adj, _individualize(colors, v)))
    return best if best is not None else ()


def canonical_form(g: PatternGraph) -> PatternGraph:
    """Isomorphism-invariant relabelling of ``g``."""
    return PatternGraph(g.n, _canonical_edges(g.n, g.edges), allow_isolated=g.allow_isolated)


def canonical_key(g: PatternGraph) -> str:
    """Stable string key of the isomorphism class."""
    return PatternGraph(g.n, _canonical_edges(g.n, g.edges), allow_isolated=True).encode()


def are_isomorphic(a: PatternGraph, b: PatternGraph) -> bool:
    return a.n == b.n and a.edge_count == b.edge_count and canonical_key(a) == canonical_key(b)


# -- automorphisms -----------------------------------------------------------


def _find_iso(adj, bits, ca: tuple, cb: tuple) -> list[int] | None:
    """Colour-preserving automorphism mapping colouring ``ca`` onto ``cb``."""
    ca, cb = _refine(adj, ca), _refine(adj, cb)
    if sorted(ca) != sorted(cb):
        return None
    cell_a = _target_cell(ca)
    if cell_a is None:
        # discrete: the map is forced
        inv_b = {c: v for v, c in enumerate(cb)}
        perm = [inv_b[ca[v]] for v in range(len(adj))]
        for v in range(len(adj)):
            img = sum(1 << perm[u] for u in adj[v])
            if img != bits[perm[v]]:
                return None
        return perm
    color = ca[cell_a[0]]
    x = cell_a[0]
    for y in (v for v in range(len(adj)) if cb[v] == color):
        found = _find_iso(adj, bits, _individualize(ca, x), _individualize(cb, y))
        if found is not None:
            return found
    return None


def automorphism_count(g: PatternGraph) -> int:
    """``|Aut(g)|`` as a product of orbit sizes along a stabiliser chain."""
    adj = _adj_lists(g)
    bits = g.adjacency_bits
    colors = _refine(adj, _initial_colors(g))
    total = 1
    while True:
        cell = _target_cell(colors)
        if cell is None:
            return total
        x = cell[0]
        fixed = _individualize(colors, x)
        orbit = 1
        for y in cell[1:]:
            if _find_iso(adj, bits, fixed, _individualize(colors, y)) is not None:
                orbit += 1
        total *= orbit
        colors = _refine(adj, fixed)


def automorphism_count_bruteforce(g: PatternGraph) -> int:
    """Plain backtracking over adjacency-preserving bijections (test oracle)."""
    n = g.n
    adj = g.adjacency
    image = [-1] * n
    used = [False] * n

    def extend(i: int) -> int:
        if i == n:
            return 1
        count = 0
        for w in range(n):
            if used[w] or len(adj[w]) != len(adj[i]):
                continue
            if all((j in adj[i]) == (image[j] in adj[w]) for j in range(i)):
                used[w] = True
                image[i] = w
                count += extend(i + 1)
                used[w] = False
        return count

    return extend(0)

"""Exact weighted homomorphism counting and subgraph spectra.

``hom(F, G)`` is the sum over all maps ``V(F) -> V(G)`` of the product of
edge weights along the image of every edge of ``F``. Node weights (part
measures of a step kernel) enter the same sum as one factor per node of
``F``; for graphs they are all 1.

Three evaluation routes compute that sum:

* ``brute``: literal enumeration in Fraction arithmetic; the oracle.
* ``dp``: variable elimination over dense integer tensors along a greedy
  min-fill order.
* ``sparse``: depth-first placement over a CSR target (numba or numpy).

``auto`` picks ``dp`` when the dense elimination fits the budget and
``sparse`` otherwise.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _accel
from .canon import _canonical_edges, canonical_key
from .config import DEFAULTS, Config, GuardExceeded
from .graphs import PatternGraph, WeightedGraph
from .rational import common_denominator

log = logging.getLogger(__name__)

STRATEGIES = ("auto", "brute", "dp", "sparse")
_INT64_SAFE = 2**62


# -- integer-scaled targets --------------------------------------------------


@dataclass(frozen=True)
class Target:
    """A weighted graph or step kernel scaled to integers.

    ``matrix[i][j] = int_entry / edge_den`` and ``node[i] = int_node / node_den``.
    """

    n: int
    entries: tuple[tuple[int, int, int], ...]  # (i, j, w) with i <= j, w != 0
    node_int: tuple[int, ...]
    edge_den: int
    node_den: int
    exact_entries: object = None  # (i, j) -> Fraction, for the brute oracle
    exact_nodes: tuple = ()

    @classmethod
    def from_graph(cls, G: WeightedGraph) -> "Target":
        den = common_denominator(w for _, w in G.weights)
        entries = tuple((u, v, int(w * den)) for (u, v), w in G.weights)
        return cls(G.n, entries, (1,) * G.n, den, 1, G.weight_map, (Fraction(1),) * G.n)

    @classmethod
    def from_matrix(cls, values: Sequence[Sequence[Fraction]], measures: Sequence[Fraction]) -> "Target":
        k = len(measures)
        exact = {}
        for i in range(k):
            for j in range(i, k):
                if values[i][j] != 0:
                    exact[(i, j)] = Fraction(values[i][j])
        den = common_denominator(exact.values())
        entries = tuple((i, j, int(w * den)) for (i, j), w in sorted(exact.items()))
        mden = common_denominator(measures)
        node_int = tuple(int(Fraction(m) * mden) for m in measures)
        return cls(k, entries, node_int, den, mden, exact, tuple(Fraction(m) for m in measures))

    @cached_property
    def max_entry(self) -> int:
        return max((abs(w) for _, _, w in self.entries), default=0)

    @cached_property
    def max_node(self) -> int:
        return max((abs(x) for x in self.node_int), default=0)

    def fits_int64(self, k: int, e: int) -> bool:
        bound = self.n**k * max(self.max_entry, 1) ** e * max(self.max_node, 1) ** k
        return bound < _INT64_SAFE

    def dense(self, dtype) -> np.ndarray:
        m = np.zeros((self.n, self.n), dtype=dtype)
        for i, j, w in self.entries:
            m[i, j] = w
            m[j, i] = w
        return m

    def nodes(self, dtype) -> np.ndarray:
        return np.array(self.node_int, dtype=dtype)

    def csr(self, dtype):
        rows: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for i, j, w in self.entries:
            rows[i].append((j, w))
            if i != j:
                rows[j].append((i, w))
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        cols, vals = [], []
        for i, row in enumerate(rows):
            row.sort()
            indptr[i + 1] = indptr[i] + len(row)
            cols.extend(c for c, _ in row)
            vals.extend(w for _, w in row)
        indices = np.array(cols, dtype=np.int64)
        data = np.array(vals, dtype=dtype) if vals else np.zeros(0, dtype=dtype)
        return indptr, indices, data

    def exact_weight(self, i: int, j: int) -> Fraction:
        if i > j:
            i, j = j, i
        return self.exact_entries.get((i, j), Fraction(0))


_TARGET_CACHE: dict[int, tuple[object, Target]] = {}


def as_target(G) -> Target:
    if isinstance(G, Target):
        return G
    cached = _TARGET_CACHE.get(id(G))
    if cached is not None and cached[0] is G:
        return cached[1]
    if isinstance(G, WeightedGraph):
        tgt = Target.from_graph(G)
    elif hasattr(G, "values") and hasattr(G, "measures"):
        tgt = Target.from_matrix(G.values, G.measures)
    else:
        raise TypeError(f"cannot count homomorphisms into {type(G).__name__}")
    if len(_TARGET_CACHE) > 256:
        _TARGET_CACHE.clear()
    _TARGET_CACHE[id(G)] = (G, tgt)
    return tgt


# -- brute force (oracle) ----------------------------------------------------


def _hom_brute(F: PatternGraph, tgt: Target, injective: bool = False, first: Sequence[int] | None = None) -> Fraction:
    n = tgt.n
    k = F.n
    earlier = [[u for u in F.adjacency[v] if u < v] for v in range(k)]
    nodes = tgt.exact_nodes
    image = [0] * k
    used = [False] * n

    def extend(i: int, acc: Fraction) -> Fraction:
        if i == k:
            return acc
        total = Fraction(0)
        choices = first if (i == 0 and first is not None) else range(n)
        for x in choices:
            if injective and used[x]:
                continue
            w = acc * nodes[x]
            for u in earlier[i]:
                if w == 0:
                    break
                w *= tgt.exact_weight(image[u], x)
            if w == 0:
                continue
            image[i] = x
            used[x] = True
            total += extend(i + 1, w)
            used[x] = False
        return total

    if k == 0:
        return Fraction(1)
    return extend(0, Fraction(1))


def _check_brute_guard(F: PatternGraph, tgt: Target, cfg: Config) -> None:
    if tgt.n**F.n > cfg.brute_guard:
        raise GuardExceeded(f"brute force needs {tgt.n}^{F.n} maps; guard is {cfg.brute_guard}")


# -- elimination DP ----------------------------------------------------------


def elimination_order(F: PatternGraph) -> tuple[list[int], int]:
    """Greedy min-degree (ties: min-fill, then label) order and its width."""
    nbrs = {v: set(F.adjacency[v]) for v in range(F.n)}
    order, width = [], 0
    while nbrs:
        def cost(v):
            nb = list(nbrs[v])
            fill = sum(1 for i in range(len(nb)) for j in range(i + 1, len(nb)) if nb[j] not in nbrs[nb[i]])
            return (len(nb), fill, v)

        v = min(nbrs, key=cost)
        nb = nbrs.pop(v)
        width = max(width, len(nb))
        for a in nb:
            nbrs[a].discard(v)
            nbrs[a] |= nb - {a}
        order.append(v)
    return order, width


def _hom_dp(F: PatternGraph, tgt: Target, order: list[int], dtype) -> int:
    mat = tgt.dense(dtype)
    node = tgt.nodes(dtype)
    factors: list[tuple[tuple[int, ...], np.ndarray]] = [((u, v), mat) for u, v in F.edges]
    scalar = 1
    for v in order:
        hit = [f for f in factors if v in f[0]]
        factors = [f for f in factors if v not in f[0]]
        out = sorted({x for vars_, _ in hit for x in vars_} - {v})
        operands: list = []
        for vars_, arr in hit:
            operands += [arr, list(vars_)]
        operands += [node, [v]]
        res = np.einsum(*operands, out)
        if out:
            factors.append((tuple(out), res))
        else:
            scalar *= int(res.item() if isinstance(res, np.ndarray) else res)
    return scalar


# -- sparse placement --------------------------------------------------------


def _plan(F: PatternGraph, comp: list[int]):
    """Placement order with an anchor (placed neighbour) for every later node."""
    adj = F.adjacency
    placed: list[int] = []
    pos: dict[int, int] = {}
    rest = set(comp)
    while rest:
        if not placed:
            v = max(rest, key=lambda x: (len(adj[x]), -x))
        else:
            v = max(rest, key=lambda x: (sum(1 for y in adj[x] if y in pos), len(adj[x]), -x))
        pos[v] = len(placed)
        placed.append(v)
        rest.discard(v)
    anchor = np.full(len(placed), -1, dtype=np.int64)
    back_ptr = np.zeros(len(placed) + 1, dtype=np.int64)
    back: list[int] = []
    for i, v in enumerate(placed):
        prev = sorted(pos[u] for u in adj[v] if pos[u] < i)
        if i > 0:
            if not prev:
                raise ValueError("component is not connected")
            anchor[i] = prev[0]
            back.extend(prev[1:])
        back_ptr[i + 1] = len(back)
    return anchor, back_ptr, np.array(back, dtype=np.int64)


def _hom_sparse(F: PatternGraph, tgt: Target, use_int64: bool, backend: str | None, threads: int) -> int:
    dtype = np.int64 if use_int64 else object
    csr = tgt.csr(dtype)
    node = tgt.nodes(dtype)
    if backend is None:
        backend = "numba" if (use_int64 and _accel.numba_enabled()) else "numpy"
    if backend == "numba" and not use_int64:
        backend = "numpy"
    run = _accel.hom_csr_numba if backend == "numba" else _accel.hom_csr_numpy
    result = 1
    for comp in F.components():
        plan = _plan(F, comp)
        roots = np.arange(tgt.n, dtype=np.int64)
        if threads > 1 and tgt.n > 1:
            chunks = np.array_split(roots, threads)
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(lambda r: run(plan, csr, node, r), chunks))
            value = sum(parts)
        else:
            value = run(plan, csr, node, roots)
        result *= value
        if result == 0:
            break
    return result


# -- public API --------------------------------------------------------------


def weighted_hom(
    F: PatternGraph,
    G,
    strategy: str = "auto",
    threads: int = 1,
    backend: str | None = None,
    cfg: Config = DEFAULTS,
) -> Fraction:
    """Homomorphism sum with node weights into a graph, kernel or Target."""
    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}")
    if F.n > cfg.node_cap:
        raise GuardExceeded(f"pattern has {F.n} nodes; node cap is {cfg.node_cap}")
    tgt = as_target(G)
    k, e = F.n, F.edge_count
    if k == 0:
        return Fraction(1)
    if strategy == "brute":
        _check_brute_guard(F, tgt, cfg)
        if threads > 1:
            chunks = [list(c) for c in np.array_split(np.arange(tgt.n), threads) if len(c)]
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(lambda c: _hom_brute(F, tgt, first=[int(x) for x in c]), chunks))
            return sum(parts, Fraction(0))
        return _hom_brute(F, tgt)

    den = tgt.edge_den**e * tgt.node_den**k
    use_int64 = tgt.fits_int64(k, e)
    order, width = elimination_order(F)
    if strategy == "auto":
        strategy = "dp" if tgt.n ** (width + 1) <= cfg.dense_budget else "sparse"
    if strategy == "dp":
        if width > cfg.dp_width_cap:
            log.warning("elimination width %d exceeds cap %d; using sparse placement", width, cfg.dp_width_cap)
            strategy = "sparse"
        elif tgt.n ** (width + 1) > cfg.dense_budget:
            raise GuardExceeded(
                f"dense elimination touches {tgt.n}^{width + 1} entries; budget is {cfg.dense_budget}"
            )
    if strategy == "dp":
        value = _hom_dp(F, tgt, order, np.int64 if use_int64 else object)
    else:
        value = _hom_sparse(F, tgt, use_int64, backend, threads)
    return Fraction(int(value), den)


def hom(F: PatternGraph, G: WeightedGraph, strategy: str = "auto", threads: int = 1,
        backend: str | None = None, cfg: Config = DEFAULTS) -> Fraction:
    """Weighted homomorphism count ``hom(F, G)``."""
    if not isinstance(G, WeightedGraph):
        raise TypeError("hom expects a WeightedGraph target; use t_kernel for step kernels")
    return weighted_hom(F, G, strategy=strategy, threads=threads, backend=backend, cfg=cfg)


def inj(F: PatternGraph, G: WeightedGraph, cfg: Config = DEFAULTS) -> Fraction:
    """Sum over injective maps only (brute force)."""
    tgt = as_target(G)
    _check_brute_guard(F, tgt, cfg)
    if F.n > tgt.n:
        return Fraction(0)
    return _hom_brute(F, tgt, injective=True)


def t(F: PatternGraph, G: WeightedGraph, strategy: str = "auto", cfg: Config = DEFAULTS, **kw) -> Fraction:
    """Homomorphism density ``hom(F, G) / |V(G)|^|V(F)|``."""
    return hom(F, G, strategy=strategy, cfg=cfg, **kw) / Fraction(G.n) ** F.n


# -- subgraph spectrum -------------------------------------------------------

SPECTRUM_FORMAT = "commons-lab/spectrum"
SPECTRUM_VERSION = 1
CACHE_ENV = "COMMONS_LAB_CACHE_DIR"


@dataclass(frozen=True)
class SpectrumEntry:
    graph: PatternGraph
    multiplicity: int

    @property
    def key(self) -> str:
        return self.graph.encode()


@dataclass(frozen=True)
class SubgraphSpectrum:
    """``sub(H, F)`` for every class ``H`` of subgraphs of ``F`` without isolated nodes."""

    pattern_key: str
    edge_count: int
    entries: tuple[SpectrumEntry, ...]

    @cached_property
    def _index(self) -> dict[str, int]:
        return {e.key: e.multiplicity for e in self.entries}

    def multiplicity(self, H: PatternGraph) -> int:
        return self._index.get(canonical_key(H), 0)

    def with_edges(self, r: int) -> list[SpectrumEntry]:
        return [e for e in self.entries if e.graph.edge_count == r]

    def check_binomial(self) -> bool:
        return all(
            sum(x.multiplicity for x in self.with_edges(r)) == comb(self.edge_count, r)
            for r in range(self.edge_count + 1)
        )

    def to_json_obj(self) -> list:
        return [[e.key, e.multiplicity] for e in self.entries]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


_SPECTRA: dict[str, SubgraphSpectrum] = {}
_cache_enabled = True


def set_cache_enabled(flag: bool) -> None:
    """Toggle both the in-memory and the on-disk spectrum caches."""
    global _cache_enabled
    _cache_enabled = flag


def _cache_path(key: str) -> Path | None:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    digest = hashlib.sha256(key.encode()).hexdigest()[:20]
    return Path(root) / f"spectrum-v{SPECTRUM_VERSION}-{digest}.json"


def _read_cache(key: str) -> SubgraphSpectrum | None:
    path = _cache_path(key)
    if path is None or not path.exists():
        return None
    try:
        obj = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError):
        return None
    if obj.get("format") != SPECTRUM_FORMAT or obj.get("version") != SPECTRUM_VERSION or obj.get("pattern") != key:
        return None
    entries = tuple(SpectrumEntry(PatternGraph.decode(enc), int(m)) for enc, m in obj["entries"])
    return SubgraphSpectrum(key, PatternGraph.decode(key, allow_isolated=True).edge_count, entries)


def _write_cache(spec: SubgraphSpectrum) -> None:
    path = _cache_path(spec.pattern_key)
    if path is None:
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    obj = {"format": SPECTRUM_FORMAT, "version": SPECTRUM_VERSION, "pattern": spec.pattern_key,
           "entries": spec.to_json_obj()}
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(obj, separators=(",", ":")))
    tmp.replace(path)


def _compute_spectrum(F: PatternGraph) -> dict[str, int]:
    edges = F.edges
    m = len(edges)
    counts: dict[str, int] = {}
    for mask in range(1 << m):
        chosen = [edges[i] for i in range(m) if mask >> i & 1]
        nodes = sorted({x for e in chosen for x in e})
        index = {v: i for i, v in enumerate(nodes)}
        local = tuple(sorted((index[u], index[v]) for u, v in chosen))
        canon = _canonical_edges(len(nodes), local)
        enc = f"{len(nodes)}:" + ",".join(f"{u}-{v}" for u, v in canon)
        counts[enc] = counts.get(enc, 0) + 1
    return counts


def subgraph_spectrum(F: PatternGraph, cfg: Config = DEFAULTS) -> SubgraphSpectrum:
    if F.n > cfg.node_cap:
        raise GuardExceeded(f"pattern has {F.n} nodes; node cap is {cfg.node_cap}")
    if F.edge_count > cfg.spectrum_edge_cap:
        raise GuardExceeded(f"2^{F.edge_count} edge subsets exceed the spectrum cap 2^{cfg.spectrum_edge_cap}")
    key = canonical_key(F)
    if _cache_enabled:
        if key in _SPECTRA:
            return _SPECTRA[key]
        cached = _read_cache(key)
        if cached is not None:
            _SPECTRA[key] = cached
            return cached
    counts = _compute_spectrum(PatternGraph.decode(key, allow_isolated=True) if F.n else F)
    entries = [SpectrumEntry(PatternGraph.decode(enc), mult) for enc, mult in counts.items()]
    entries.sort(key=lambda x: (x.graph.edge_count, x.graph.n, x.key))
    spec = SubgraphSpectrum(key, F.edge_count, tuple(entries))
    if _cache_enabled:
        _SPECTRA[key] = spec
        _write_cache(spec)
    return spec


def sub(H: PatternGraph, F: PatternGraph, cfg: Config = DEFAULTS) -> int:
    """Number of subgraphs of ``F`` (isolated nodes deleted) isomorphic to ``H``."""
    if H.edge_count > F.edge_count or H.n > F.n:
        return 0
    return subgraph_spectrum(F, cfg).multiplicity(H)

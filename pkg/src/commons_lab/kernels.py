"""Step kernels on [0,1]^2 with rational values and part measures.

A ``StepKernel`` with parts ``I_1..I_k`` of measures ``mu_i`` takes the value
``values[i][j]`` on ``I_i x I_j``. Densities are evaluated by the weighted
homomorphism engine with the measures as node weights, so any rational
kernel is allowed (values outside [0, 1] included).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .config import DEFAULTS, Config, GuardExceeded
from .graphs import PatternGraph, WeightedGraph
from .homomorphism import weighted_hom
from .rational import RationalLike, format_rational, to_rational

GRAPHON = "graphon"
W1 = "W1-kernel"
KERNEL = "kernel"


@dataclass(frozen=True)
class StepKernel:
    measures: tuple[Fraction, ...]
    values: tuple[tuple[Fraction, ...], ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        mu = tuple(to_rational(m) for m in self.measures)
        k = len(mu)
        if k == 0:
            raise ValueError("a step kernel needs at least one part")
        if any(m <= 0 for m in mu):
            raise ValueError("part measures must be positive")
        if sum(mu) != 1:
            raise ValueError(f"part measures sum to {sum(mu)}, not 1")
        vals = tuple(tuple(to_rational(x) for x in row) for row in self.values)
        if len(vals) != k or any(len(row) != k for row in vals):
            raise ValueError("values must be a k x k matrix")
        for i in range(k):
            for j in range(i + 1, k):
                if vals[i][j] != vals[j][i]:
                    raise ValueError(f"kernel is not symmetric at {(i, j)}")
        object.__setattr__(self, "measures", mu)
        object.__setattr__(self, "values", vals)

    @property
    def parts(self) -> int:
        return len(self.measures)

    @cached_property
    def bound(self) -> Fraction:
        """``max |value|`` (the sup norm of the step function)."""
        return max(abs(x) for row in self.values for x in row)

    @cached_property
    def kind(self) -> str:
        flat = [x for row in self.values for x in row]
        if all(0 <= x <= 1 for x in flat):
            return GRAPHON
        if all(-1 <= x <= 1 for x in flat):
            return W1
        return KERNEL

    def is_graphon(self) -> bool:
        return self.kind == GRAPHON

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.values for x in row)

    def row_integrals(self) -> list[Fraction]:
        return [sum((v * m for v, m in zip(row, self.measures)), Fraction(0)) for row in self.values]

    def integral(self) -> Fraction:
        return sum((m * r for m, r in zip(self.measures, self.row_integrals())), Fraction(0))

    def to_json_obj(self) -> dict:
        return {
            "kind": "step_kernel",
            "parts": self.parts,
            "measures": [format_rational(m) for m in self.measures],
            "values": [[format_rational(x) for x in row] for row in self.values],
        }

    @cached_property
    def identity(self) -> str:
        """Short content hash used to tag coefficient polynomials and certificates."""
        text = json.dumps(self.to_json_obj(), separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"StepKernel{label}(parts={self.parts}, kind={self.kind}, bound={self.bound})"


def kernel_from_json_obj(obj: Mapping) -> StepKernel:
    if obj.get("kind") != "step_kernel":
        raise ValueError(f"not a step kernel: kind={obj.get('kind')!r}")
    k = int(obj["parts"])
    ker = StepKernel(tuple(obj["measures"]), tuple(tuple(r) for r in obj["values"]))
    if ker.parts != k:
        raise ValueError("parts field disagrees with measures")
    return ker


def dumps_kernel(W: StepKernel) -> str:
    return json.dumps(W.to_json_obj(), separators=(",", ":"))


def uniform_kernel(values: Sequence[Sequence[RationalLike]], name: str | None = None) -> StepKernel:
    k = len(values)
    return StepKernel((Fraction(1, k),) * k, tuple(tuple(r) for r in values), name=name)


def constant_kernel(c: RationalLike, parts: int = 1) -> StepKernel:
    c = to_rational(c)
    return uniform_kernel([[c] * parts for _ in range(parts)], name=f"const({format_rational(c)})")


def from_weighted_graph(G: WeightedGraph) -> StepKernel:
    """``W_G``: uniform parts, weight matrix values (loop weight on the diagonal)."""
    vals = [[G.weight(i, j) for j in range(G.n)] for i in range(G.n)]
    return uniform_kernel(vals, name=f"W[{G.name}]" if G.name else None)


def t_kernel(F: PatternGraph, W: StepKernel, strategy: str = "auto", cfg: Config = DEFAULTS, **kw) -> Fraction:
    """``t(F, W)``: integral of the edge-value product over ``[0,1]^V(F)``."""
    return weighted_hom(F, W, strategy=strategy, cfg=cfg, **kw)


def affine(W: StepKernel, a: RationalLike, b: RationalLike) -> StepKernel:
    """The kernel ``a + b W`` on the same parts."""
    a, b = to_rational(a), to_rational(b)
    return StepKernel(W.measures, tuple(tuple(a + b * x for x in row) for row in W.values))


def complement(W: StepKernel) -> StepKernel:
    return affine(W, 1, -1)


def scale(W: StepKernel, c: RationalLike) -> StepKernel:
    return affine(W, 0, c)


def shrink(U: StepKernel, delta: RationalLike) -> StepKernel:
    """``U_delta``: ``U`` squeezed onto ``[0, delta]^2``, zero elsewhere."""
    delta = to_rational(delta)
    if not (0 < delta <= 1):
        raise ValueError("delta must lie in (0, 1]")
    if delta == 1:
        return U
    k = U.parts
    mu = tuple(m * delta for m in U.measures) + (1 - delta,)
    vals = tuple(tuple(row) + (Fraction(0),) for row in U.values) + ((Fraction(0),) * (k + 1),)
    return StepKernel(mu, vals)


def tensor_power(U: StepKernel, m: int, cfg: Config = DEFAULTS) -> StepKernel:
    """``U^{(x)m}`` on m-tuples of parts; values and measures multiply."""
    if m < 1:
        raise ValueError("tensor power needs m >= 1")
    if U.parts**m > cfg.tensor_part_guard:
        raise GuardExceeded(f"{U.parts}^{m} parts exceed the tensor guard {cfg.tensor_part_guard}")
    if m == 1:
        return U
    tuples = list(product(range(U.parts), repeat=m))
    mu = []
    for tup in tuples:
        x = Fraction(1)
        for i in tup:
            x *= U.measures[i]
        mu.append(x)
    vals = []
    for a in tuples:
        row = []
        for b in tuples:
            x = Fraction(1)
            for i, j in zip(a, b):
                x *= U.values[i][j]
                if x == 0:
                    break
            row.append(x)
        vals.append(tuple(row))
    return StepKernel(tuple(mu), tuple(vals))


def tensor_product(X: StepKernel, Y: StepKernel, cfg: Config = DEFAULTS) -> StepKernel:
    """Parts ``(i, j)`` (index ``i*|Y| + j``); measures and values multiply, so densities do too."""
    if X.parts * Y.parts > cfg.tensor_part_guard:
        raise GuardExceeded(f"{X.parts * Y.parts} parts exceed the tensor guard {cfg.tensor_part_guard}")
    mu = tuple(a * b for a in X.measures for b in Y.measures)
    vals = tuple(
        tuple(X.values[i][k] * Y.values[j][l] for k in range(X.parts) for l in range(Y.parts))
        for i in range(X.parts)
        for j in range(Y.parts)
    )
    return StepKernel(mu, vals)


def categorical_product(G: WeightedGraph, H: WeightedGraph, cfg: Config = DEFAULTS) -> WeightedGraph:
    """Node set ``V(G) x V(H)`` (pair ``(g, h)`` is ``g*|H| + h``); weights multiply."""
    if G.n * H.n > cfg.product_guard:
        raise GuardExceeded(f"product would have {G.n * H.n} nodes; guard is {cfg.product_guard}")
    nh = H.n
    hw = H.weights
    weights: dict[tuple[int, int], Fraction] = {}
    for (g1, g2), wg in G.weights:
        for (h1, h2), wh in hw:
            w = wg * wh
            pairs = {(g1 * nh + h1, g2 * nh + h2), (g1 * nh + h2, g2 * nh + h1)}
            for a, b in pairs:
                key = (a, b) if a <= b else (b, a)
                weights[key] = w
    name = f"{G.name}x{H.name}" if G.name and H.name else None
    return WeightedGraph(G.n * H.n, tuple(weights.items()), allow_loops=any(a == b for a, b in weights), name=name)


def is_balanced(U: StepKernel) -> bool:
    """Every row integral vanishes exactly."""
    return all(r == 0 for r in U.row_integrals())


# -- seeded generators -------------------------------------------------------

DEFAULT_VALUES = (Fraction(-1), Fraction(0), Fraction(1), Fraction(1, 2))
GRAPHON_VALUES = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))


def _random_measures(rng: np.random.Generator, parts: int, uniform: bool) -> tuple[Fraction, ...]:
    if uniform:
        return (Fraction(1, parts),) * parts
    w = [int(x) for x in rng.integers(1, 5, size=parts)]
    s = sum(w)
    return tuple(Fraction(x, s) for x in w)


def balance_projection(values: Sequence[Sequence[Fraction]], measures: Sequence[Fraction]) -> list[list[Fraction]]:
    """Subtract weighted row and column means; rows of the result integrate to 0."""
    k = len(measures)
    r = [sum((values[i][j] * measures[j] for j in range(k)), Fraction(0)) for i in range(k)]
    c = sum((measures[i] * r[i] for i in range(k)), Fraction(0))
    return [[values[i][j] - r[i] - r[j] + c for j in range(k)] for i in range(k)]


def random_kernel(
    seed: int,
    parts: int,
    value_set: Iterable[RationalLike] = DEFAULT_VALUES,
    balanced: bool = False,
    uniform_measures: bool = False,
    cfg: Config = DEFAULTS,
) -> StepKernel:
    """Deterministic random step kernel.

    With ``balanced=True`` the matrix is projected to zero row integrals and,
    when needed, rescaled into [-1, 1] (rescaling keeps the rows balanced,
    clamping would not). Degenerate all-zero projections are redrawn.
    """
    if not (1 <= parts <= 12):
        raise ValueError("parts must be between 1 and 12")
    if balanced and parts == 1:
        raise ValueError("a nonzero balanced kernel needs at least 2 parts")
    vals = [to_rational(v) for v in value_set]
    rng = np.random.default_rng(seed)
    for _ in range(cfg.random_kernel_retries):
        mu = _random_measures(rng, parts, uniform_measures)
        idx = rng.integers(0, len(vals), size=(parts, parts))
        m = [[vals[int(idx[min(i, j), max(i, j)])] for j in range(parts)] for i in range(parts)]
        if not balanced:
            return StepKernel(mu, tuple(tuple(r) for r in m))
        p = balance_projection(m, mu)
        top = max(abs(x) for row in p for x in row)
        if top == 0:
            continue
        if top > 1:
            p = [[x / top for x in row] for row in p]
        ker = StepKernel(mu, tuple(tuple(r) for r in p))
        if is_balanced(ker):
            return ker
    raise RuntimeError(f"no balanced nonzero kernel after {cfg.random_kernel_retries} draws (parts={parts})")


def random_graphon(seed: int, parts: int, value_set: Iterable[RationalLike] = GRAPHON_VALUES,
                   uniform_measures: bool = False) -> StepKernel:
    vals = [to_rational(v) for v in value_set]
    if any(not (0 <= v <= 1) for v in vals):
        raise ValueError("graphon values must lie in [0, 1]")
    return random_kernel(seed, parts, vals, balanced=False, uniform_measures=uniform_measures)

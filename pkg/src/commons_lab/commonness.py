"""Perturbation expansions and verdicts.

For a kernel ``U`` the symmetric two-sided density excess

    (t(F, 1+eps U) + t(F, 1-eps U)) / 2 - 1

is an even polynomial in ``eps`` whose coefficient at ``eps^r`` is
``c_r(F, U) = sum over subgraph classes H with r edges of sub(H, F) t(H, U)``.
Everything below is computed from that identity in exact arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .canon import canonical_key
from .config import DEFAULTS, Config
from .graphs import PatternGraph, WeightedGraph, complete_graph, cycle_graph, graph_from_json_obj, path_graph
from .homomorphism import subgraph_spectrum, sub
from .kernels import (
    StepKernel,
    affine,
    from_weighted_graph,
    is_balanced,
    kernel_from_json_obj,
    scale,
    shrink,
    t_kernel,
    tensor_power,
)
from .rational import RationalLike, decimal_repr, format_rational, to_rational
from .structure import INFINITE, analyze_structure, length_to_json

CERT_SCHEMA = "commons-lab/certificate"
CERT_VERSION = 1

C4 = cycle_graph(4)
K4 = complete_graph(4)
K3 = complete_graph(3)
K2 = complete_graph(2)
P3 = path_graph(3)


class PreconditionError(ValueError):
    """Inputs violate an operation's stated precondition."""


# -- density sources ---------------------------------------------------------


@dataclass(frozen=True)
class DensityProfile:
    """Known densities ``t(H, U)`` of a kernel that is not materialised.

    Missing classes are filled in only where that is forced: the empty graph
    has density 1, a disconnected ``H`` multiplies over its components, and
    for a balanced kernel any ``H`` with a degree-1 node has density 0.
    """

    densities: tuple[tuple[str, Fraction], ...]
    balanced: bool
    source: str = ""

    @classmethod
    def from_graphs(cls, items: Mapping[PatternGraph, RationalLike] | Iterable, balanced: bool, source: str = ""):
        pairs = items.items() if isinstance(items, Mapping) else items
        dens = {canonical_key(H): to_rational(v) for H, v in pairs}
        return cls(tuple(sorted(dens.items())), balanced, source)

    def density(self, H: PatternGraph) -> Fraction:
        if H.n == 0:
            return Fraction(1)
        table = dict(self.densities)
        key = canonical_key(H)
        if key in table:
            return table[key]
        if self.balanced and H.min_degree() == 1:
            return Fraction(0)
        comps = H.components()
        if len(comps) > 1:
            out = Fraction(1)
            for comp in comps:
                out *= self.density(H.induced_on(comp))
            return out
        raise KeyError(f"density of {key} is not known for this profile")

    @property
    def identity(self) -> str:
        return "profile:" + (self.source or "anonymous")

    def to_json_obj(self) -> dict:
        return {
            "kind": "density_profile",
            "balanced": self.balanced,
            "source": self.source,
            "densities": [[k, format_rational(v)] for k, v in self.densities],
        }

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "DensityProfile":
        return cls(
            tuple((k, to_rational(v)) for k, v in obj["densities"]),
            bool(obj["balanced"]),
            obj.get("source", ""),
        )


KernelLike = Union[StepKernel, DensityProfile]


def density(H: PatternGraph, U: KernelLike, cfg: Config = DEFAULTS) -> Fraction:
    if isinstance(U, DensityProfile):
        return U.density(H)
    return t_kernel(H, U, cfg=cfg)


def _is_balanced(U: KernelLike) -> bool:
    return U.balanced if isinstance(U, DensityProfile) else is_balanced(U)


def _source_obj(U: KernelLike) -> dict:
    return U.to_json_obj()


def _source_from_obj(obj: Mapping) -> KernelLike:
    if obj.get("kind") == "density_profile":
        return DensityProfile.from_json_obj(obj)
    return kernel_from_json_obj(obj)


# -- coefficients and polynomial ---------------------------------------------


def coefficient_terms(F: PatternGraph, U: KernelLike, r: int, cfg: Config = DEFAULTS):
    """Per-class audit of ``c_r``: list of ``(H, sub(H,F), t(H,U))``."""
    return [(e.graph, e.multiplicity, density(e.graph, U, cfg)) for e in subgraph_spectrum(F, cfg).with_edges(r)]


def coefficient(F: PatternGraph, U: KernelLike, r: int, cfg: Config = DEFAULTS) -> Fraction:
    """``c_r(F, U)``, disconnected classes included."""
    if r < 0:
        raise ValueError("r must be non-negative")
    return sum((m * x for _, m, x in coefficient_terms(F, U, r, cfg)), Fraction(0))


@dataclass(frozen=True)
class EpsPolynomial:
    """``sum_r c_{2r} eps^{2r}`` for ``r = 1..floor(|E(F)|/2)``."""

    coefficients: tuple[tuple[int, Fraction], ...]
    pattern: str
    kernel: str

    def __post_init__(self):
        for exp, _ in self.coefficients:
            if exp % 2 or exp < 2:
                raise ValueError(f"exponent {exp} is not an even number >= 2")

    def coefficient(self, exponent: int) -> Fraction:
        return dict(self.coefficients).get(exponent, Fraction(0))

    def __call__(self, eps: RationalLike) -> Fraction:
        eps = to_rational(eps)
        return sum((c * eps**exp for exp, c in self.coefficients), Fraction(0))

    evaluate = __call__

    def to_json_obj(self) -> dict:
        return {
            "pattern": self.pattern,
            "kernel": self.kernel,
            "coefficients": [[exp, format_rational(c)] for exp, c in self.coefficients],
        }


def p_polynomial(F: PatternGraph, U: KernelLike, cfg: Config = DEFAULTS) -> EpsPolynomial:
    coeffs = tuple((2 * r, coefficient(F, U, 2 * r, cfg)) for r in range(1, F.edge_count // 2 + 1))
    return EpsPolynomial(coeffs, canonical_key(F), U.identity)


def two_sided_excess(F: PatternGraph, V: StepKernel, cfg: Config = DEFAULTS) -> Fraction:
    """``(t(F, 1+V) + t(F, 1-V)) / 2 - 1`` computed directly from densities."""
    return (t_kernel(F, affine(V, 1, 1), cfg=cfg) + t_kernel(F, affine(V, 1, -1), cfg=cfg)) / 2 - 1


def local_excess_scaled(F: PatternGraph, U: StepKernel, eps: RationalLike, cfg: Config = DEFAULTS) -> Fraction:
    """Reading "p(F, eps U) for U in W_1": polynomial evaluated at ``eps``."""
    if U.bound > 1:
        raise PreconditionError("U must take values in [-1, 1]")
    return p_polynomial(F, U, cfg)(eps)


def local_excess_supnorm(F: PatternGraph, V: StepKernel, eps: RationalLike, cfg: Config = DEFAULTS) -> Fraction:
    """Reading "t(F,1+V)+t(F,1-V) >= 2 for ||V||_inf <= eps", as the excess."""
    if V.bound > to_rational(eps):
        raise PreconditionError(f"||V||_inf = {V.bound} exceeds eps = {eps}")
    return two_sided_excess(F, V, cfg)


# -- certificates ------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    kind: str
    inputs: dict
    evidence: dict
    verdict: str
    schema_version: int = field(default=CERT_VERSION)

    def to_json_obj(self) -> dict:
        return {
            "schema": CERT_SCHEMA,
            "version": self.schema_version,
            "kind": self.kind,
            "inputs": self.inputs,
            "evidence": self.evidence,
            "verdict": self.verdict,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "Certificate":
        if obj.get("schema") != CERT_SCHEMA:
            raise ValueError("not a certificate")
        if obj.get("version") != CERT_VERSION:
            raise ValueError(f"unsupported certificate version {obj.get('version')}")
        return cls(obj["kind"], obj["inputs"], obj["evidence"], obj["verdict"], obj["version"])

    @classmethod
    def loads(cls, text: str) -> "Certificate":
        return cls.from_json_obj(json.loads(text))


ALL_ZERO = "all-zero"
FIRST_POSITIVE = "first-nonzero-positive"
FIRST_NEGATIVE = "first-nonzero-negative"


def weak_local_verdict(F: PatternGraph, U: KernelLike, cfg: Config = DEFAULTS) -> Certificate:
    """Inspect ``c_2, c_4, ...`` in order; the first nonzero one decides."""
    poly = p_polynomial(F, U, cfg)
    verdict, first = ALL_ZERO, None
    for exp, c in poly.coefficients:
        if c != 0:
            verdict = FIRST_POSITIVE if c > 0 else FIRST_NEGATIVE
            first = {"exponent": exp, "value": format_rational(c)}
            break
    evidence = {
        "coefficients": [[exp, format_rational(c)] for exp, c in poly.coefficients],
        "first_nonzero": first,
    }
    if verdict == FIRST_NEGATIVE:
        evidence["note"] = "witness against weak local commonness"
    return Certificate(
        "weakly-local-verdict",
        {"pattern": F.to_json_obj(), "kernel": _source_obj(U)},
        evidence,
        verdict,
    )


CERTIFIED = "certified-weakly-locally-common"
UNKNOWN = "unknown"


def cycle_pair_condition(report) -> tuple[bool, str]:
    """Whether the odd-cycle-pair condition (necessary for failure) holds."""
    pair = report.odd_cycle_pair
    if pair is None:
        return False, "no two odd cycles with at most one common node"
    g_even = report.even_girth
    s = pair.g1 + pair.g2
    if pair.g1 < pair.g2:
        holds = g_even is INFINITE or s <= g_even
        rel = "<=" if holds else ">"
    else:
        holds = g_even is INFINITE or s < g_even
        rel = "<" if holds else ">="
    return holds, f"g1={pair.g1}, g2={pair.g2}: g1+g2={s} {rel} g_even={length_to_json(g_even)}"


def structural_classify(F: PatternGraph, cfg: Config = DEFAULTS) -> Certificate:
    report = analyze_structure(F, cfg)
    holds, why = cycle_pair_condition(report)
    reasons = [why]
    properties = []
    verdict = UNKNOWN if holds else CERTIFIED
    if holds:
        reasons.append("odd-cycle-pair condition holds; no converse is claimed")
    perturbation = None
    if report.is_bipartite:
        perturbation = Fraction(1, 4 * F.edge_count) if F.edge_count else None
        properties.append("locally-common")
        reasons.append(f"bipartite: locally common for perturbation {format_rational(perturbation)}")
    girth_even = report.girth is not INFINITE and report.girth % 2 == 0
    if report.is_forest or girth_even:
        properties.append("weakly-locally-Sidorenko")
        reasons.append("forest or even girth: weakly locally Sidorenko")
    evidence = {
        "structure": report.to_json_obj(),
        "cycle_pair_condition": holds,
        "properties": properties,
        "perturbation": format_rational(perturbation) if perturbation is not None else None,
        "reasons": reasons,
    }
    return Certificate("structural-classification", {"pattern": F.to_json_obj()}, evidence, verdict)


# -- local commonness refutation --------------------------------------------


def necessary_condition(
    F: PatternGraph, eps: RationalLike, U: KernelLike, m: int, cfg: Config = DEFAULTS
) -> Fraction:
    """``sub(C4,F) t(C4,U)^m + eps^2 sub(K4,F) t(K4,U)^m`` for balanced ``U``.

    A negative value rules out local commonness for perturbation ``eps``.
    """
    if m < 1 or m % 2 == 0:
        raise PreconditionError("m must be an odd positive integer")
    if not _is_balanced(U):
        raise PreconditionError("U is not balanced")
    eps = to_rational(eps)
    a = density(C4, U, cfg)
    b = density(K4, U, cfg)
    return sub(C4, F, cfg) * a**m + eps**2 * sub(K4, F, cfg) * b**m


def _expansion_terms(F: PatternGraph, U: KernelLike, cfg: Config):
    """``(q, e, sub, t)`` for each class with a positive even edge count."""
    terms = []
    for entry in subgraph_spectrum(F, cfg):
        H = entry.graph
        e = H.edge_count
        if e == 0 or e % 2:
            continue
        terms.append((H.n, e, entry.multiplicity, density(H, U, cfg), canonical_key(H)))
    return terms


def expansion_value(terms, eps: Fraction, m: int, delta: Fraction) -> Fraction:
    """``p(F, eps (U^m)_delta)`` as a sum over classes, each ``t`` raised to ``m``."""
    return sum((mult * eps**e * delta**q * x**m for q, e, mult, x, _ in terms), Fraction(0))


def expansion_by_order(terms, eps: Fraction, m: int) -> dict[int, Fraction]:
    """Coefficients of the delta-polynomial, keyed by ``q = |V(H)|``."""
    out: dict[int, Fraction] = {}
    for q, e, mult, x, _ in terms:
        out[q] = out.get(q, Fraction(0)) + mult * eps**e * x**m
    return dict(sorted(out.items()))


def direct_refutation_value(F: PatternGraph, U: StepKernel, eps: Fraction, m: int, delta: Fraction,
                            cfg: Config = DEFAULTS) -> Fraction:
    """Materialise ``eps (U^m)_delta`` and evaluate the two-sided excess."""
    V = scale(shrink(tensor_power(U, m, cfg), delta), eps)
    return two_sided_excess(F, V, cfg)


def find_witness(
    F: PatternGraph,
    eps: RationalLike,
    U: KernelLike,
    m_max: int = 99,
    delta_steps: int = 20,
    cfg: Config = DEFAULTS,
    direct_budget: int = 64,
) -> Certificate:
    """Search odd ``m`` then ``delta = 1/2, 1/4, ...`` with ``p(F, eps (U^m)_delta) < 0``.

    Smallest odd ``m`` wins, then the largest working ``delta``. When ``U`` is
    a step kernel whose tensor power has at most ``direct_budget`` parts, the
    value is re-checked on the materialised kernel.
    """
    eps = to_rational(eps)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    if F.n > 8:
        raise PreconditionError("find_witness handles patterns with at most 8 nodes")
    if sub(K4, F, cfg) == 0:
        raise PreconditionError("F must contain K4")
    if not _is_balanced(U):
        raise PreconditionError("U must be balanced")
    a, b = density(C4, U, cfg), density(K4, U, cfg)
    if a + b >= 0:
        raise PreconditionError(f"need t(C4,U)+t(K4,U) < 0, got {format_rational(a + b)}")

    terms = _expansion_terms(F, U, cfg)
    best = None
    found = None
    for m in range(1, m_max + 1, 2):
        orders = expansion_by_order(terms, eps, m)
        lead = orders.get(4, Fraction(0))
        low = {q: c for q, c in orders.items() if q < 4 and c != 0}
        if low or lead >= 0:
            continue
        delta = Fraction(1, 2)
        for _ in range(delta_steps):
            value = expansion_value(terms, eps, m, delta)
            if best is None or value < best[2]:
                best = (m, delta, value)
            if value < 0:
                found = (m, delta, value, lead)
                break
            delta /= 2
        if found:
            break

    inputs = {
        "pattern": F.to_json_obj(),
        "eps": format_rational(eps),
        "kernel": _source_obj(U),
        "m_max": m_max,
        "delta_steps": delta_steps,
    }
    evidence = {
        "t_C4": format_rational(a),
        "t_K4": format_rational(b),
        "classes": [[key, q, e, mult, format_rational(x)] for q, e, mult, x, key in terms],
    }
    if found is None:
        if best is not None:
            evidence["best"] = {"m": best[0], "delta": format_rational(best[1]), "value": format_rational(best[2])}
        return Certificate("local-commonness-refutation", inputs, evidence, "search-exhausted")

    m, delta, value, lead = found
    evidence.update(
        m=m,
        delta=format_rational(delta),
        value=format_rational(value),
        value_decimal=decimal_repr(value),
        leading_delta4=format_rational(lead),
        necessary_condition=format_rational(necessary_condition(F, eps, U, m, cfg)),
    )
    reverified = "expansion-replay"
    if isinstance(U, StepKernel) and U.parts**m <= min(direct_budget, cfg.tensor_part_guard):
        direct = direct_refutation_value(F, U, eps, m, delta, cfg)
        if direct != value:
            raise AssertionError(f"direct evaluation {direct} disagrees with expansion {value}")
        reverified = "direct-kernel"
    evidence["reverified_by"] = reverified
    return Certificate("local-commonness-refutation", inputs, evidence, "not-locally-common-for-perturbation")


# -- Goodman / Sidorenko -----------------------------------------------------


def _require_graphon(W: StepKernel) -> None:
    if not W.is_graphon():
        raise PreconditionError("W must be a graphon (values in [0, 1])")


def goodman_defect(W: StepKernel, cfg: Config = DEFAULTS) -> Fraction:
    """``t(K3, W) + t(K3, 1-W) - 1/4``; never negative."""
    _require_graphon(W)
    return t_kernel(K3, W, cfg=cfg) + t_kernel(K3, affine(W, 1, -1), cfg=cfg) - Fraction(1, 4)


def sidorenko_defect(F: PatternGraph, W: StepKernel, cfg: Config = DEFAULTS) -> Fraction:
    """``t(F, W) - t(K2, W)^|E(F)|``."""
    _require_graphon(W)
    return t_kernel(F, W, cfg=cfg) - t_kernel(K2, W, cfg=cfg) ** F.edge_count


def goodman_certificate(W: StepKernel, cfg: Config = DEFAULTS) -> Certificate:
    d = goodman_defect(W, cfg)
    return Certificate(
        "goodman",
        {"kernel": W.to_json_obj()},
        {"defect": format_rational(d), "decimal": decimal_repr(d)},
        "equality" if d == 0 else ("holds" if d > 0 else "violated"),
    )


def sidorenko_certificate(F: PatternGraph, W: StepKernel, cfg: Config = DEFAULTS) -> Certificate:
    d = sidorenko_defect(F, W, cfg)
    report = analyze_structure(F, cfg)
    evidence = {"defect": format_rational(d), "decimal": decimal_repr(d), "bipartite": report.is_bipartite}
    if not report.is_bipartite:
        evidence["note"] = "non-bipartite pattern: the Sidorenko inequality is not expected to hold"
    return Certificate(
        "sidorenko-defect",
        {"pattern": F.to_json_obj(), "kernel": W.to_json_obj()},
        evidence,
        "nonnegative" if d >= 0 else "negative",
    )


def search_sidorenko_violation(F: PatternGraph, max_nodes: int = 4, cfg: Config = DEFAULTS):
    """Smallest defect over step graphons of all graphs on at most ``max_nodes`` nodes."""
    from .structure import all_graphs

    best = None
    for n in range(2, max_nodes + 1):
        for g in all_graphs(n):
            if g.edge_count == 0:
                continue
            W = from_weighted_graph(WeightedGraph.from_edges(n, ((u, v, 1) for u, v in g.edges)))
            d = sidorenko_defect(F, W, cfg)
            if best is None or d < best[1]:
                best = (g, d, W)
    return best


# -- re-verification ---------------------------------------------------------


def verify_certificate(cert: Certificate, cfg: Config = DEFAULTS) -> bool:
    """Replay a certificate's evidence through the public operations."""
    inp = cert.inputs
    if cert.kind == "weakly-local-verdict":
        F = graph_from_json_obj(inp["pattern"])
        U = _source_from_obj(inp["kernel"])
        again = weak_local_verdict(F, U, cfg)
        return again.verdict == cert.verdict and again.evidence == cert.evidence
    if cert.kind == "structural-classification":
        F = graph_from_json_obj(inp["pattern"])
        again = structural_classify(F, cfg)
        return again.verdict == cert.verdict and again.evidence == cert.evidence
    if cert.kind == "local-commonness-refutation":
        F = graph_from_json_obj(inp["pattern"])
        U = _source_from_obj(inp["kernel"])
        eps = to_rational(inp["eps"])
        if cert.verdict != "not-locally-common-for-perturbation":
            again = find_witness(F, eps, U, inp["m_max"], inp["delta_steps"], cfg)
            return again.verdict == cert.verdict
        ev = cert.evidence
        m, delta, value = int(ev["m"]), to_rational(ev["delta"]), to_rational(ev["value"])
        if m % 2 == 0 or not (0 < delta <= 1) or value >= 0 or not _is_balanced(U):
            return False
        # replay class by class from the raw spectrum, independent of the search loop
        replay = Fraction(0)
        for entry in subgraph_spectrum(F, cfg):
            H = entry.graph
            if H.edge_count == 0 or H.edge_count % 2:
                continue
            replay += entry.multiplicity * eps**H.edge_count * delta**H.n * density(H, U, cfg) ** m
        if replay != value:
            return False
        if ev.get("reverified_by") == "direct-kernel":
            return direct_refutation_value(F, U, eps, m, delta, cfg) == value
        return True
    if cert.kind == "goodman":
        W = kernel_from_json_obj(inp["kernel"])
        return goodman_certificate(W, cfg).to_json_obj() == cert.to_json_obj()
    if cert.kind == "sidorenko-defect":
        F = graph_from_json_obj(inp["pattern"])
        W = kernel_from_json_obj(inp["kernel"])
        return sidorenko_certificate(F, W, cfg).to_json_obj() == cert.to_json_obj()
    raise ValueError(f"unknown certificate kind {cert.kind!r}")

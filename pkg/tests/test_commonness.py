import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commons_lab.commonness import (
    CERTIFIED,
    UNKNOWN,
    Certificate,
    DensityProfile,
    PreconditionError,
    _expansion_terms,
    coefficient,
    direct_refutation_value,
    expansion_value,
    find_witness,
    goodman_certificate,
    goodman_defect,
    local_excess_scaled,
    local_excess_supnorm,
    necessary_condition,
    p_polynomial,
    search_sidorenko_violation,
    sidorenko_certificate,
    sidorenko_defect,
    structural_classify,
    two_sided_excess,
    verify_certificate,
    weak_local_verdict,
)
from commons_lab.config import DEFAULTS
from commons_lab.constructions import build_g1, build_pentagon_triangle
from commons_lab.graphs import PatternGraph, complete_graph, cycle_graph, path_graph
from commons_lab.kernels import (
    constant_kernel,
    from_weighted_graph,
    is_balanced,
    random_graphon,
    random_kernel,
    scale,
    t_kernel,
    tensor_product,
    uniform_kernel,
)
from commons_lab.sampling import random_mirror_graph
from commons_lab.structure import all_graphs
from strategies import patterns, step_kernels

C4, K4, K3 = cycle_graph(4), complete_graph(4), complete_graph(3)
EPS = st.sampled_from([Fraction(1, 2), Fraction(1, 3), Fraction(2, 7), Fraction(1)])


def balanced_block() -> "object":
    """4 equal parts, -1 on the diagonal and 1/3 elsewhere; every row integrates to 0."""
    third = Fraction(1, 3)
    return uniform_kernel([[-1 if i == j else third for j in range(4)] for i in range(4)])


@settings(max_examples=40)
@given(patterns(max_n=5), step_kernels(max_parts=3), EPS)
def test_polynomial_matches_direct_excess(F, U, eps):
    assert p_polynomial(F, U)(eps) == two_sided_excess(F, scale(U, eps))


@settings(max_examples=40)
@given(patterns(max_n=5), step_kernels(max_parts=3), EPS)
def test_two_readings_agree(F, U, eps):
    assert local_excess_scaled(F, U, eps) == local_excess_supnorm(F, scale(U, eps), eps)


def test_reading_preconditions():
    big = constant_kernel(2)
    with pytest.raises(PreconditionError):
        local_excess_scaled(K3, big, Fraction(1, 2))
    with pytest.raises(PreconditionError):
        local_excess_supnorm(K3, constant_kernel(1), Fraction(1, 2))


def test_k4_closed_form_for_balanced_kernels():
    for seed in range(25):
        U = random_kernel(seed, 2 + seed % 5, balanced=True)
        a, b = t_kernel(C4, U), t_kernel(K4, U)
        poly = p_polynomial(K4, U)
        assert poly.coefficients == ((2, 0), (4, 3 * a), (6, b))
        assert poly(Fraction(1, 2)) == 3 * a / 16 + b / 64


def test_balanced_kernels_kill_the_quadratic_term():
    for seed in range(20):
        U = random_kernel(seed, 3, balanced=True)
        F = all_graphs(5)[seed % 30 + 3]
        if F.min_degree() == 0:
            continue
        assert coefficient(F, U, 2) == 0


def test_mirror_symmetric_densities_are_nonnegative():
    rng = np.random.default_rng(5)
    for i in range(60):
        F, _ = random_mirror_graph(rng, max_nodes=7)
        U = random_kernel(1000 + i, 2 + i % 4)
        assert t_kernel(F, U) >= 0


def test_weak_verdicts():
    U = from_weighted_graph(build_g1())
    cert = weak_local_verdict(C4, U)
    assert cert.verdict == "first-nonzero-positive"
    assert weak_local_verdict(K3, constant_kernel(0)).verdict == "all-zero"
    assert verify_certificate(cert)


def test_weak_verdict_consistent_with_classifier():
    for F in [K3, C4, K4, cycle_graph(5), path_graph(4)]:
        assert structural_classify(F).verdict == CERTIFIED
        for seed in range(15):
            U = random_kernel(seed, 2 + seed % 4, balanced=seed % 2 == 0)
            assert weak_local_verdict(F, U).verdict != "first-nonzero-negative"


def test_classifier_examples():
    assert structural_classify(build_pentagon_triangle()).verdict == UNKNOWN
    two_triangles = PatternGraph(5, ((0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (0, 4)))
    cert = structural_classify(two_triangles)
    assert cert.verdict == UNKNOWN and cert.evidence["cycle_pair_condition"]
    bow_with_c4 = PatternGraph(5, two_triangles.edges + ((1, 3),))
    # even girth 4 < 3 + 3 with equal odd cycles: no longer flagged
    assert structural_classify(bow_with_c4).verdict == CERTIFIED
    c4 = structural_classify(C4)
    assert "locally-common" in c4.evidence["properties"]
    assert c4.evidence["perturbation"] == "1/16"


@pytest.mark.parametrize("n", [3, 4, 5])
def test_classifier_is_stable_under_relabeling(n):
    for F in all_graphs(n):
        if F.edge_count == 0 or F.min_degree() == 0:
            continue
        perm = list(range(F.n))[::-1]
        assert structural_classify(F).verdict == structural_classify(F.relabel(perm)).verdict


def test_necessary_condition_matches_leading_coefficient():
    prof = DensityProfile.from_graphs({C4: Fraction(1, 8), K4: Fraction(-1, 4)}, balanced=True)
    eps = Fraction(1, 2)
    cert = find_witness(K4, eps, prof)
    ev = cert.evidence
    nc = necessary_condition(K4, eps, prof, ev["m"])
    assert Fraction(ev["leading_delta4"]) == eps**4 * nc < 0
    with pytest.raises(PreconditionError):
        necessary_condition(K4, eps, prof, 2)


def test_synthetic_profile_witness():
    prof = DensityProfile.from_graphs({C4: Fraction(1, 8), K4: Fraction(-1, 4)}, balanced=True, source="synthetic")
    cert = find_witness(K4, Fraction(1, 2), prof)
    assert cert.verdict == "not-locally-common-for-perturbation"
    ev = cert.evidence
    assert (ev["m"], ev["delta"], ev["value"]) == (5, "1/2", "-5/8388608")
    assert ev["reverified_by"] == "expansion-replay"
    assert verify_certificate(cert)
    back = Certificate.loads(cert.dumps())
    assert back == cert and verify_certificate(back)


def test_expansion_matches_a_materialised_kernel():
    B = balanced_block()
    U = tensor_product(B, from_weighted_graph(build_g1()))
    assert is_balanced(U) and U.parts == 16
    assert t_kernel(C4, U) == Fraction(1, 108)
    assert t_kernel(K4, U) == Fraction(-1, 243)
    terms = _expansion_terms(K4, U, DEFAULTS)
    for eps, delta in [(Fraction(3), Fraction(1, 2)), (Fraction(1, 2), Fraction(1, 4))]:
        value = expansion_value(terms, eps, 1, delta)
        assert value == direct_refutation_value(K4, U, eps, 1, delta)
    # large enough eps makes the K4 term win even though t(C4)+t(K4) > 0
    assert expansion_value(terms, Fraction(3), 1, Fraction(1, 2)) < 0
    with pytest.raises(PreconditionError):
        find_witness(K4, 3, U)


def test_witness_search_can_exhaust():
    prof = DensityProfile.from_graphs({C4: Fraction(1, 8), K4: Fraction(-1, 4)}, balanced=True)
    cert = find_witness(K4, Fraction(1, 100), prof, m_max=3, delta_steps=3)
    assert cert.verdict == "search-exhausted"
    assert verify_certificate(cert)


def test_witness_preconditions():
    prof = DensityProfile.from_graphs({C4: Fraction(1, 8), K4: Fraction(-1, 4)}, balanced=True)
    with pytest.raises(PreconditionError):
        find_witness(C4, Fraction(1, 2), prof)
    with pytest.raises(PreconditionError):
        find_witness(K4, Fraction(1, 2), DensityProfile.from_graphs({C4: 1, K4: 1}, balanced=True))
    with pytest.raises(PreconditionError):
        find_witness(K4, Fraction(1, 2), DensityProfile.from_graphs({C4: 1, K4: -2}, balanced=False))
    with pytest.raises(PreconditionError):
        find_witness(K4, 0, prof)


def test_profile_fills_forced_densities_only():
    prof = DensityProfile.from_graphs({C4: Fraction(1, 8)}, balanced=True)
    assert prof.density(path_graph(3)) == 0
    two_c4 = PatternGraph(8, C4.edges + tuple((u + 4, v + 4) for u, v in C4.edges))
    assert prof.density(two_c4) == Fraction(1, 64)
    with pytest.raises(KeyError):
        prof.density(K4)
    again = DensityProfile.from_json_obj(json.loads(json.dumps(prof.to_json_obj())))
    assert again == prof


def test_goodman():
    assert goodman_defect(constant_kernel(Fraction(1, 2))) == 0
    for seed in range(40):
        W = random_graphon(seed, 1 + seed % 6)
        cert = goodman_certificate(W)
        assert goodman_defect(W) >= 0 and cert.verdict in ("holds", "equality")
        assert verify_certificate(Certificate.loads(cert.dumps()))
    with pytest.raises(PreconditionError):
        goodman_defect(constant_kernel(-1))


def test_sidorenko():
    for seed in range(30):
        W = random_graphon(seed, 1 + seed % 5)
        assert sidorenko_defect(C4, W) >= 0
        assert sidorenko_defect(path_graph(4), W) >= 0
    g, d, W = search_sidorenko_violation(K3, max_nodes=4)
    assert d < 0
    cert = sidorenko_certificate(K3, W)
    assert cert.verdict == "negative" and "note" in cert.evidence
    assert verify_certificate(cert)


def test_certificate_schema_checks():
    cert = goodman_certificate(constant_kernel(Fraction(1, 3)))
    obj = cert.to_json_obj()
    with pytest.raises(ValueError):
        Certificate.from_json_obj({**obj, "version": 99})
    with pytest.raises(ValueError):
        Certificate.from_json_obj({**obj, "schema": "other"})
    assert cert.dumps() == Certificate.loads(cert.dumps()).dumps()

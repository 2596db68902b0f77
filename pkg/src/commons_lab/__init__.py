"""Exact homomorphism densities, perturbation expansions and local-commonness certificates."""

from .commonness import (
    Certificate,
    DensityProfile,
    EpsPolynomial,
    coefficient,
    find_witness,
    goodman_defect,
    necessary_condition,
    p_polynomial,
    sidorenko_defect,
    structural_classify,
    verify_certificate,
    weak_local_verdict,
)
from .config import DEFAULTS, Config, GuardExceeded, load_config
from .constructions import (
    GlueHypergraph,
    build_g1,
    build_g2,
    build_g3,
    build_pentagon_triangle,
    build_prop43_graph,
    dual_hypergraph,
    g3_density_bound,
)
from .graphs import PatternGraph, WeightedGraph, named_pattern
from .homomorphism import SubgraphSpectrum, hom, inj, sub, subgraph_spectrum, t
from .kernels import (
    StepKernel,
    affine,
    categorical_product,
    from_weighted_graph,
    is_balanced,
    random_kernel,
    shrink,
    t_kernel,
    tensor_power,
)
from .structure import analyze_structure, automorphism_count, is_mirror_symmetric

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "Config",
    "DEFAULTS",
    "DensityProfile",
    "EpsPolynomial",
    "GlueHypergraph",
    "GuardExceeded",
    "PatternGraph",
    "StepKernel",
    "SubgraphSpectrum",
    "WeightedGraph",
    "affine",
    "analyze_structure",
    "automorphism_count",
    "build_g1",
    "build_g2",
    "build_g3",
    "build_pentagon_triangle",
    "build_prop43_graph",
    "categorical_product",
    "coefficient",
    "dual_hypergraph",
    "find_witness",
    "from_weighted_graph",
    "g3_density_bound",
    "goodman_defect",
    "hom",
    "inj",
    "is_balanced",
    "is_mirror_symmetric",
    "load_config",
    "named_pattern",
    "necessary_condition",
    "p_polynomial",
    "random_kernel",
    "shrink",
    "sidorenko_defect",
    "structural_classify",
    "sub",
    "subgraph_spectrum",
    "t",
    "t_kernel",
    "tensor_power",
    "verify_certificate",
    "weak_local_verdict",
]

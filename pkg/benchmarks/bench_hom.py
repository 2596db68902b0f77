"""Sparse homomorphism counting: numba kernel vs the pure-numpy fallback.

    python benchmarks/bench_hom.py [--repeat 3] [--quick]

Each case is counted once per backend (after a warm-up call so JIT compile
time is excluded); the two counts must agree exactly. Setting
COMMONS_LAB_NUMBA=0 makes the library pick the numpy path by default; here
both paths are called explicitly.
"""

import argparse
import timeit

from commons_lab._accel import numba_enabled
from commons_lab.constructions import (
    build_g2,
    build_g3,
    build_pentagon_triangle,
    dual_hypergraph,
    projective_plane_incidence,
    prop43_graph_balanced,
)
from commons_lab.graphs import complete_graph, cycle_graph
from commons_lab.homomorphism import weighted_hom


def cases(quick=False):
    G3 = build_g3(build_g2(2), dual_hypergraph(projective_plane_incidence(7)))
    yield "K4 -> G3(r=8)", complete_graph(4), G3
    yield "C4 -> G3(r=8)", cycle_graph(4), G3
    yield "C6 -> G3(r=8)", cycle_graph(6), G3
    yield "pentagon-triangle -> G_20", build_pentagon_triangle(), prop43_graph_balanced(20)[0]
    if not quick:
        G3b = build_g3(build_g2(3), dual_hypergraph(projective_plane_incidence(11)))
        yield "K4 -> G3(r=12)", complete_graph(4), G3b
        yield "C5 -> K6xG1", cycle_graph(5), build_g2(6)


def measure(F, G, backend, repeat):
    weighted_hom(F, G, strategy="sparse", backend=backend)  # warm-up / JIT
    timer = timeit.Timer(lambda: weighted_hom(F, G, strategy="sparse", backend=backend))
    return min(timer.repeat(repeat=repeat, number=1)), weighted_hom(F, G, strategy="sparse", backend=backend)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    if not numba_enabled():
        print("numba disabled (COMMONS_LAB_NUMBA=0 or not installed); timing numpy only")
    print(f"{'case':<28}{'numba s':>10}{'numpy s':>10}{'speedup':>9}  value")
    for name, F, G in cases(args.quick):
        t_np, v_np = measure(F, G, "numpy", args.repeat)
        if numba_enabled():
            t_nb, v_nb = measure(F, G, "numba", args.repeat)
            assert v_nb == v_np, (name, v_nb, v_np)
            print(f"{name:<28}{t_nb:>10.4f}{t_np:>10.4f}{t_np / t_nb:>8.1f}x  {v_np}")
        else:
            print(f"{name:<28}{'-':>10}{t_np:>10.4f}{'-':>9}  {v_np}")


if __name__ == "__main__":
    main()

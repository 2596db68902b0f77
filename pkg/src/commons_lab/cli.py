"""``commons-lab`` command line.

Every command prints one JSON report on stdout. Exit codes: 0 success,
1 usage or invalid input, 2 witness search exhausted, 3 guard exceeded,
4 a reproduction check failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .commonness import (
    DensityProfile,
    PreconditionError,
    find_witness,
    goodman_certificate,
    search_sidorenko_violation,
    sidorenko_certificate,
    structural_classify,
    weak_local_verdict,
)
from .config import Config, GuardExceeded, load_config
from .constructions import (
    GlueHypergraph,
    build_g1,
    build_g2,
    build_g3,
    build_pentagon_triangle,
    dual_hypergraph,
    fano_incidence,
    heawood_graph,
    projective_plane_incidence,
    prop43_graph_balanced,
    random_regular_bipartite,
)
from .graphs import PatternGraph, WeightedGraph, complete_weighted, graph_from_json_obj, named_pattern
from .homomorphism import STRATEGIES, hom, inj, set_cache_enabled, sub, subgraph_spectrum, t
from .kernels import (
    StepKernel,
    affine,
    constant_kernel,
    from_weighted_graph,
    is_balanced,
    kernel_from_json_obj,
    random_kernel,
    shrink,
    t_kernel,
    tensor_power,
)
from .rational import decimal_repr, format_rational, to_rational
from .reproduce import CHECK_NAMES, g3_profile, pentagon_triangle_report, run_all, run_check

REPORT_SCHEMA = "commons-lab/report"
REPORT_VERSION = 1

EXIT_OK, EXIT_USAGE, EXIT_EXHAUSTED, EXIT_GUARD, EXIT_CHECK_FAILED = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def rational_out(x: Fraction) -> dict:
    return {"value": format_rational(x), "decimal": decimal_repr(x)}


# -- loading inputs ----------------------------------------------------------


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON from {path}: {exc}") from exc


def _unwrap(obj, key: str):
    """Accept either the raw object or a report whose outputs hold it."""
    if isinstance(obj, dict) and obj.get("schema") == REPORT_SCHEMA:
        outputs = obj.get("outputs", {})
        if key not in outputs:
            raise UsageError(f"report has no '{key}' output")
        return outputs[key]
    return obj


def load_pattern(spec: str) -> PatternGraph:
    if Path(spec).is_file():
        g = graph_from_json_obj(_unwrap(_read_json(spec), "graph"))
        if not isinstance(g, PatternGraph):
            raise UsageError(f"{spec} holds a weighted graph, not a pattern")
        return g
    try:
        return named_pattern(spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def load_target(spec: str, cfg: Config) -> WeightedGraph:
    if Path(spec).is_file():
        g = graph_from_json_obj(_unwrap(_read_json(spec), "graph"))
        return g.to_weighted() if isinstance(g, PatternGraph) else g
    key = spec.strip().lower()
    if key == "g1":
        return build_g1()
    if key.startswith("g2:"):
        return build_g2(int(key[3:]), cfg)
    if key.startswith("prop43:") or key.startswith("gk:"):
        return prop43_graph_balanced(int(key.split(":")[1]))[0]
    if key.startswith("k") and key[1:].isdigit():
        return complete_weighted(int(key[1:]))
    try:
        return named_pattern(spec).to_weighted()
    except ValueError as exc:
        raise UsageError(f"unknown target {spec!r}") from exc


def load_kernel(spec: str) -> StepKernel:
    if Path(spec).is_file():
        obj = _unwrap(_read_json(spec), "kernel")
        if obj.get("kind") == "step_kernel":
            return kernel_from_json_obj(obj)
        return from_weighted_graph(_as_weighted(graph_from_json_obj(obj)))
    key = spec.strip().lower()
    if key.startswith("const:"):
        return constant_kernel(to_rational(key[6:]))
    return from_weighted_graph(load_target(spec, Config()))


def _as_weighted(g) -> WeightedGraph:
    return g.to_weighted() if isinstance(g, PatternGraph) else g


def load_hypergraph(spec: str) -> GlueHypergraph:
    return GlueHypergraph.from_json_obj(_unwrap(_read_json(spec), "hypergraph"))


# -- commands ----------------------------------------------------------------


def cmd_build(args, cfg):
    what = args.what
    if what == "g1":
        g = build_g1()
    elif what == "g2":
        g = build_g2(args.n, cfg)
    elif what == "g3":
        if not args.g2 or not args.hypergraph:
            raise UsageError("build g3 needs --g2 and --hypergraph")
        g = build_g3(load_target(args.g2, cfg), load_hypergraph(args.hypergraph))
    elif what == "prop43":
        g, orientation = prop43_graph_balanced(args.k)
        return {"graph": g.to_json_obj(), "nodes": g.n, "balanced": g.is_balanced(), "orientation": orientation}, []
    elif what == "pentagon-triangle":
        g = build_pentagon_triangle()
    elif what == "hypergraph":
        src = _bipartite_source(args)
        H = dual_hypergraph(src)
        return {"hypergraph": H.to_json_obj(), "r": H.r, "N": H.N, "vertices": H.vertex_count}, []
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(what)
    out = {"graph": g.to_json_obj(), "nodes": g.n}
    if isinstance(g, WeightedGraph):
        out["balanced"] = g.is_balanced()
    return out, []


def _bipartite_source(args):
    if args.source == "heawood":
        return heawood_graph()
    if args.source == "fano":
        return fano_incidence()
    if args.source == "pg":
        return projective_plane_incidence(args.q)
    return random_regular_bipartite(args.N, args.r, args.seed_source, min_girth=args.girth)


def cmd_compute(args, cfg):
    F = load_pattern(args.pattern)
    what = args.what
    if what == "spectrum":
        spec = subgraph_spectrum(F, cfg)
        return {"spectrum": spec.to_json_obj(), "binomial_check": spec.check_binomial()}, []
    if what == "sub":
        if not args.host:
            raise UsageError("compute sub needs --host")
        return {"sub": sub(F, load_pattern(args.host), cfg)}, []
    if not args.target:
        raise UsageError(f"compute {what} needs --target")
    G = load_target(args.target, cfg)
    if what == "hom":
        value = hom(F, G, strategy=args.strategy, threads=args.threads, cfg=cfg)
    elif what == "inj":
        value = inj(F, G, cfg)
    else:
        value = t(F, G, strategy=args.strategy, threads=args.threads, cfg=cfg)
    return {what: rational_out(value)}, []


def cmd_kernel(args, cfg):
    if args.action == "build":
        if args.from_graph:
            U = from_weighted_graph(load_target(args.from_graph, cfg))
        elif args.constant is not None:
            U = constant_kernel(to_rational(args.constant), args.parts or 1)
        else:
            U = random_kernel(cfg.seed if args.seed is None else args.seed, args.parts or 3,
                              balanced=args.balanced, cfg=cfg)
    else:
        if not args.kernel:
            raise UsageError(f"kernel {args.action} needs --kernel")
        U = load_kernel(args.kernel)
    if args.action == "op":
        op = args.op
        if op == "affine":
            U = affine(U, to_rational(args.a), to_rational(args.b))
        elif op == "complement":
            U = affine(U, 1, -1)
        elif op == "shrink":
            U = shrink(U, to_rational(args.delta))
        elif op == "tensor":
            U = tensor_power(U, args.m, cfg)
        else:
            raise UsageError("kernel op needs --op")
    out = {"kernel": U.to_json_obj()}
    if args.action == "check":
        rows = U.row_integrals()
        out.update(
            kind=U.kind,
            bound=format_rational(U.bound),
            balanced=is_balanced(U),
            row_integrals=[format_rational(x) for x in rows],
        )
        if args.pattern:
            out["t"] = rational_out(t_kernel(load_pattern(args.pattern), U, cfg=cfg))
    return out, []


def cmd_verdict(args, cfg):
    cert = weak_local_verdict(load_pattern(args.pattern), load_kernel(args.kernel), cfg)
    return {"verdict": cert.verdict}, [cert]


def cmd_classify(args, cfg):
    cert = structural_classify(load_pattern(args.pattern), cfg)
    return {"verdict": cert.verdict, "properties": cert.evidence["properties"]}, [cert]


def cmd_witness(args, cfg):
    F = load_pattern(args.pattern)
    if args.g3_profile:
        n = int(args.g3_profile)
        U = g3_profile(n, cfg=cfg)
    elif args.profile:
        U = DensityProfile.from_json_obj(_unwrap(_read_json(args.profile), "profile"))
    elif args.kernel:
        U = load_kernel(args.kernel)
    else:
        raise UsageError("witness needs --kernel, --profile or --g3-profile")
    cert = find_witness(F, to_rational(args.eps), U, args.m_max, args.delta_steps, cfg)
    out = {"verdict": cert.verdict}
    for key in ("m", "delta", "value"):
        if key in cert.evidence:
            out[key] = cert.evidence[key]
    code = EXIT_EXHAUSTED if cert.verdict == "search-exhausted" else EXIT_OK
    return out, [cert], code


def cmd_goodman(args, cfg):
    cert = goodman_certificate(load_kernel(args.kernel), cfg)
    return {"defect": cert.evidence["defect"], "verdict": cert.verdict}, [cert]


def cmd_sidorenko(args, cfg):
    F = load_pattern(args.pattern)
    if args.search is not None:
        g, d, W = search_sidorenko_violation(F, args.search, cfg)
        cert = sidorenko_certificate(F, W, cfg)
        return {"best_graph": g.to_json_obj(), "defect": rational_out(d), "verdict": cert.verdict}, [cert]
    if not args.kernel:
        raise UsageError("sidorenko needs --kernel or --search")
    cert = sidorenko_certificate(F, load_kernel(args.kernel), cfg)
    return {"defect": cert.evidence["defect"], "verdict": cert.verdict}, [cert]


def cmd_reproduce(args, cfg):
    if args.target == "pentagon-triangle" and args.k is not None:
        rep = pentagon_triangle_report(args.k, cfg)
        out = {
            "hom": format_rational(rep["hom"]),
            "claimed_hom": str(rep["claimed_hom"]),
            "k": rep["k"],
            "nodes": rep["nodes"],
            "balanced": rep["balanced"],
            "orientation": rep["orientation"],
            "matches_claim": rep["hom"] == rep["claimed_hom"],
            "t": rational_out(rep["t"]),
            "coefficients": {str(r): format_rational(c) for r, c in rep["coefficients"].items()},
        }
        return out, []
    results = run_all(cfg) if args.target == "all" else [run_check(args.target, cfg)]
    table = [r.line() for r in results]
    if not args.timing:
        # timings vary run to run; keep the default report byte-stable
        table = [f"{'PASS' if r.passed else 'FAIL'} [{r.number:2d}] {r.name:<22}  {r.detail}" for r in results]
    checks = [{"number": r.number, "name": r.name, "passed": r.passed, "detail": r.detail} for r in results]
    if args.timing:
        for c, r in zip(checks, results):
            c.update(seconds=round(r.seconds, 3), limit=r.limit, in_time=r.in_time)
    if len(results) == 1:
        checks[0]["data"] = _jsonable(results[0].data)
    ok = all(r.ok if args.timing else r.passed for r in results)
    print("\n".join(table), file=sys.stderr)
    out = {"checks": checks, "table": table, "all_passed": ok}
    return out, [], EXIT_OK if ok else EXIT_CHECK_FAILED


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file overriding guards and suite sizes")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one config entry (repeatable; wins over --config)")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--no-cache", action="store_true", help="disable the spectrum cache")
    common.add_argument("--timing", action="store_true", help="add wall-clock duration to the report")
    common.add_argument("--raw", action="store_true", help="print only the main output object")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="commons-lab", description="Exact graph-limit calculus for locally common graphs.")
    p.add_argument("--version", action="version", version=__version__)
    sp = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sp.add_parser("build", parents=[common], help="build a named construction")
    b.add_argument("what", choices=["g1", "g2", "g3", "prop43", "pentagon-triangle", "hypergraph"])
    b.add_argument("--n", type=int, default=3)
    b.add_argument("--k", type=int, default=14)
    b.add_argument("--g2", help="G2 graph file (for g3)")
    b.add_argument("--hypergraph", help="glue hypergraph file (for g3)")
    b.add_argument("--source", choices=["heawood", "fano", "pg", "random"], default="pg")
    b.add_argument("--q", type=int, default=7, help="prime order of the projective plane")
    b.add_argument("--N", type=int, default=50)
    b.add_argument("--r", type=int, default=3)
    b.add_argument("--girth", type=int, default=6)
    b.add_argument("--seed-source", type=int, default=0)
    b.set_defaults(func=cmd_build)

    c = sp.add_parser("compute", parents=[common], help="hom, inj, t, sub or the subgraph spectrum")
    c.add_argument("what", choices=["hom", "inj", "t", "sub", "spectrum"])
    c.add_argument("--pattern", required=True)
    c.add_argument("--target")
    c.add_argument("--host", help="host pattern for sub")
    c.add_argument("--strategy", choices=STRATEGIES, default="auto")
    c.set_defaults(func=cmd_compute)

    k = sp.add_parser("kernel", parents=[common], help="build, transform or inspect step kernels")
    k.add_argument("action", choices=["build", "op", "check"])
    k.add_argument("--kernel")
    k.add_argument("--from-graph")
    k.add_argument("--constant")
    k.add_argument("--parts", type=int)
    k.add_argument("--seed", type=int)
    k.add_argument("--balanced", action="store_true")
    k.add_argument("--op", choices=["affine", "complement", "shrink", "tensor"])
    k.add_argument("--a", default="0")
    k.add_argument("--b", default="1")
    k.add_argument("--delta", default="1/2")
    k.add_argument("--m", type=int, default=2)
    k.add_argument("--pattern", help="also report t(pattern, kernel) (check)")
    k.set_defaults(func=cmd_kernel)

    v = sp.add_parser("verdict", parents=[common], help="weak local verdict for a kernel")
    v.add_argument("--pattern", required=True)
    v.add_argument("--kernel", required=True)
    v.set_defaults(func=cmd_verdict)

    cl = sp.add_parser("classify", parents=[common], help="structural classification")
    cl.add_argument("--pattern", required=True)
    cl.set_defaults(func=cmd_classify)

    w = sp.add_parser("witness", parents=[common], help="(m, delta) witness against local commonness")
    w.add_argument("--pattern", default="k4")
    w.add_argument("--eps", default="1/2")
    w.add_argument("--kernel")
    w.add_argument("--profile", help="density profile JSON")
    w.add_argument("--g3-profile", metavar="N", help="use the glued G3 densities for K_n x G1")
    w.add_argument("--m-max", type=int, default=99)
    w.add_argument("--delta-steps", type=int, default=20)
    w.set_defaults(func=cmd_witness)

    g = sp.add_parser("goodman", parents=[common], help="Goodman defect of a graphon")
    g.add_argument("--kernel", required=True)
    g.set_defaults(func=cmd_goodman)

    s = sp.add_parser("sidorenko", parents=[common], help="Sidorenko defect")
    s.add_argument("--pattern", required=True)
    s.add_argument("--kernel")
    s.add_argument("--search", type=int, metavar="MAX_NODES", help="scan 0/1 step graphons on few nodes")
    s.set_defaults(func=cmd_sidorenko)

    r = sp.add_parser("reproduce", parents=[common], help="run acceptance checks")
    r.add_argument("target", choices=["all"] + CHECK_NAMES)
    r.add_argument("--k", type=int, help="single-k report (pentagon-triangle)")
    r.set_defaults(func=cmd_reproduce)
    return p


def _config_from(args) -> Config:
    overrides = {}
    for item in args.set:
        if "=" not in item:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        try:
            overrides[key.strip()] = int(value)
        except ValueError as exc:
            raise UsageError(f"config values are integers: {item!r}") from exc
    try:
        return load_config(args.config, **overrides)
    except KeyError as exc:
        raise UsageError(str(exc)) from exc


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    start = time.perf_counter()
    try:
        cfg = _config_from(args)
        set_cache_enabled(not args.no_cache)
        result = args.func(args, cfg)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except GuardExceeded as exc:
        print(f"guard exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (PreconditionError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        set_cache_enabled(True)
    outputs, certs, *rest = result
    code = rest[0] if rest else EXIT_OK
    if args.raw:
        main_key = next(iter(outputs))
        print(json.dumps(outputs[main_key], separators=(",", ":")), file=stdout)
        return code
    report = {
        "schema": REPORT_SCHEMA,
        "version": REPORT_VERSION,
        "command": argv,
        "inputs": {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "timing", "verbose")},
        "outputs": outputs,
        "certificates": [c.to_json_obj() for c in certs],
    }
    if args.timing:
        report["duration_s"] = round(time.perf_counter() - start, 4)
    print(json.dumps(report, indent=2), file=stdout)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()

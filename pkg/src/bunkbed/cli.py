"""Command-line entry point: ``python -m bunkbed <subcommand> ...``.

Exit status is 0 on success, 1 when a check finds a violation, 2 on usage,
input or guard errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from typing import Optional, Sequence

from .graph import GraphError, read_instance
from .lemmas import default_corpus, handcrafted_triples, verify_lemmas
from .models import (
    ModelError,
    ModelSpec,
    Query,
    avg_poly_over_T,
    connection_polynomial,
    critical_probability,
    exact_prob,
    fraction_str,
    mc_estimate,
    report_record,
)
from .reductions import (
    HybridTriple,
    ReductionError,
    Triple,
    applicable_sites,
    delta_reduce,
    e2_condition_edge,
    parallel_pair_reduce,
    restricted_delta_reduce,
    t_contract,
    v2_reduce,
    verify_reduction,
    y_reduce,
)
from .search import (
    InstanceFilter,
    figure2_json,
    find_figure2,
    anticorrelated_constraints,
    scan_conjecture,
)

SCHEMA = 1
OK, FINDING, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _prob(text: str) -> Fraction:
    x = _frac(text)
    if not 0 <= x <= 1:
        raise argparse.ArgumentTypeError(f"probability {text} outside [0, 1]")
    return x


def _fmt(x: Fraction, decimal: bool) -> str:
    return f"{fraction_str(x)} ({float(x):.12g})" if decimal else fraction_str(x)


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(dict({"schema": SCHEMA}, **payload), indent=2, sort_keys=True))
    else:
        print(text)


# --- shared argument groups --------------------------------------------------------


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--decimal", action="store_true", help="also print decimals next to fractions")
    p.add_argument("--timing", action="store_true", help="include wall time (makes output nondeterministic)")


def _add_graph(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--graph", required=required, help="instance file (n m / edges / T: / U: / names:)")


def _add_query(p: argparse.ArgumentParser) -> None:
    p.add_argument("--from", dest="src", required=True, help="start vertex (label or id)")
    p.add_argument("--to", dest="dst", required=True, help="target vertex (label or id)")
    p.add_argument("--layer", type=int, choices=(0, 1), default=0, help="target layer")
    p.add_argument("--start-layer", type=int, choices=(0, 1), default=0)
    p.add_argument("--joint", action="append", default=[], metavar="VERTEX:LAYER",
                   help="additional endpoint that must also be reached (repeatable)")


def _add_model(p: argparse.ArgumentParser, kinds=("e1", "e2", "e3", "e4", "e5", "d1", "d2", "d3")) -> None:
    p.add_argument("--model", required=True, type=str.lower, choices=kinds)
    p.add_argument("--p", type=_prob, help="edge/red probability (E1, E5)")
    p.add_argument("--pvec", help="comma-separated per-edge probabilities (E2)")
    p.add_argument("--on-g", action="store_true", help="E1 on the graph itself instead of the bunkbed")


def _load(args):
    try:
        return read_instance(args.graph)
    except OSError as err:
        raise UsageError(f"cannot read instance file {args.graph}: {err.strerror}") from None


def _spec(args, inst) -> ModelSpec:
    kind = args.model.upper()
    t = inst.t
    if kind in ("E1", "E5") and args.p is None:
        raise UsageError(f"--model {args.model} needs --p")
    if kind == "E1":
        return ModelSpec.e1(args.p, on_bunkbed=not args.on_g)
    if kind == "E5":
        return ModelSpec.e5(args.p, t)
    if kind == "E2":
        if args.pvec:
            vec = tuple(_prob(x) for x in args.pvec.split(","))
        elif args.p is not None:
            vec = (args.p,) * inst.graph.m
        else:
            raise UsageError("--model e2 needs --pvec or --p")
        return ModelSpec.e2(vec, t)
    if kind == "E3":
        return ModelSpec.e3(t)
    if kind == "E4":
        return ModelSpec.e4(t, inst.partition)
    if kind == "D1":
        return ModelSpec.d1()
    if kind == "D2":
        return ModelSpec.d2(t)
    return ModelSpec.d3(t)


def _query(args, inst) -> Query:
    joint = []
    for item in args.joint:
        label, _, layer = item.rpartition(":")
        if not label or layer not in ("0", "1"):
            raise UsageError(f"--joint expects VERTEX:LAYER, got {item!r}")
        joint.append((inst.vertex(label), int(layer)))
    return Query(inst.vertex(args.src), inst.vertex(args.dst), args.layer, args.start_layer, tuple(joint))


def _timed(args, payload: dict, start: float) -> dict:
    if args.timing:
        payload["timing_seconds"] = round(time.perf_counter() - start, 6)
    return payload


# --- subcommands ----------------------------------------------------------------------


def cmd_compute(args) -> int:
    start = time.perf_counter()
    inst = _load(args)
    spec, q = _spec(args, inst), _query(args, inst)
    value = exact_prob(inst.graph, spec, q)
    rec = report_record(inst.graph, spec, q, value=value)
    if args.decimal:
        rec["decimal"] = float(value)
    _emit(args, _timed(args, rec, start), _fmt(value, args.decimal))
    return OK


def _poly_text(coeffs) -> str:
    terms = []
    for k, c in enumerate(coeffs):
        if c:
            c = str(Fraction(c))
            terms.append(c + ("" if k == 0 else "*p" if k == 1 else f"*p^{k}"))
    return " + ".join(terms) if terms else "0"


def cmd_poly(args) -> int:
    start = time.perf_counter()
    inst = _load(args)
    if args.p is None:
        args.p = Fraction(1, 2)
    spec, q = _spec(args, inst), _query(args, inst)
    poly = connection_polynomial(inst.graph, spec, q)
    rec = report_record(inst.graph, spec, q, poly=poly)
    _emit(args, _timed(args, rec, start), _poly_text(poly.coeffs))
    return OK


def cmd_average(args) -> int:
    start = time.perf_counter()
    inst = _load(args)
    q = _query(args, inst)
    poly = avg_poly_over_T(inst.graph, q)
    payload = {"query": {"u": q.u, "v": q.v, "target_layer": q.target_layer},
               "polynomial": [fraction_str(c) for c in poly.coeffs]}
    text = "average over T: " + _poly_text(poly.coeffs)
    if args.p is not None:
        value = poly(args.p)
        payload["p"] = fraction_str(args.p)
        payload["value"] = fraction_str(value)
        text = _fmt(value, args.decimal)
    _emit(args, _timed(args, payload, start), text)
    return OK


def cmd_critical(args) -> int:
    start = time.perf_counter()
    inst = _load(args)
    if args.tol <= 0:
        raise UsageError("--tol must be positive")
    rep = critical_probability(inst.graph, inst.vertex(args.src), inst.vertex(args.dst), args.tol)
    sign = {-1: "-", 0: "0", 1: "+"}
    roots = [{"lo": fraction_str(r.lo), "hi": fraction_str(r.hi), "lo_decimal": float(r.lo),
              "hi_decimal": float(r.hi), "exact": r.exact,
              "sign_left": sign[r.left_sign], "sign_right": sign[r.right_sign]} for r in rep.roots]
    payload = {"difference": [fraction_str(c) for c in rep.difference.coeffs], "roots": roots,
               "unique_crossing": rep.unique_crossing}
    lines = [f"difference: {_poly_text(rep.difference.coeffs)}", f"roots in [0,1]: {len(rep.roots)}"]
    for r in rep.roots:
        where = f"= {fraction_str(r.lo)}" if r.exact else f"in ({fraction_str(r.lo)}, {fraction_str(r.hi)})"
        lines.append(f"  root {where} ~ {float(r.midpoint()):.12f}  sign {sign[r.left_sign]}/{sign[r.right_sign]}")
    lines.append(f"unique -/+ crossing: {'yes' if rep.unique_crossing else 'no'}")
    _emit(args, _timed(args, payload, start), "\n".join(lines))
    return OK


def cmd_estimate(args) -> int:
    start = time.perf_counter()
    inst = _load(args)
    spec, q = _spec(args, inst), _query(args, inst)
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    est, err = mc_estimate(inst.graph, spec, q, args.samples, args.seed, jobs=args.jobs)
    rec = report_record(inst.graph, spec, q)
    rec.update({"estimate": est, "stderr": err, "samples": args.samples, "seed": args.seed})
    _emit(args, _timed(args, rec, start), f"{est!r} +- {err!r} ({args.samples} samples, seed {args.seed})")
    return OK


def cmd_verify_lemmas(args) -> int:
    start = time.perf_counter()
    if args.graph:
        graphs = []
        for path in args.graph:
            try:
                graphs.append(read_instance(path).graph)
            except OSError as err:
                raise UsageError(f"cannot read instance file {path}: {err.strerror}") from None
    else:
        graphs = default_corpus(args.max_vertices)
    rows = verify_lemmas(graphs, figure2=args.figure2)
    if args.handcrafted:
        from .lemmas import check_reductions
        extra = check_reductions([], triples=handcrafted_triples())
        extra.name = "reduction soundness (handcrafted multigraphs)"
        rows.insert(-1, extra)
    width = max(len(r.name) for r in rows)
    lines = [f"{'check':<{width}}  {'cases':>7}  status  expected"]
    for r in rows:
        status = "pass" if r.passed else "FAIL"
        expect = "pass" if r.expect_pass else "fail"
        lines.append(f"{r.name:<{width}}  {r.cases:>7}  {status:<6}  {expect}" + (f"  [{r.note}]" if r.note else ""))
        for msg in r.failures[:5]:
            lines.append(f"    {msg}")
    ok = all(r.as_expected for r in rows)
    lines.append("all checks as expected" if ok else "UNEXPECTED RESULTS")
    payload = {"graphs": len(graphs), "rows": [r.to_json() for r in rows], "ok": ok}
    _emit(args, _timed(args, payload, start), "\n".join(lines))
    return OK if ok else FINDING


_OPS = {
    "t_contract": (t_contract, 1),
    "v2": (v2_reduce, 1),
    "delta": (delta_reduce, 3),
    "restricted_delta": (restricted_delta_reduce, 3),
    "y": (y_reduce, 1),
    "parallel_pair": (parallel_pair_reduce, 2),
    "e2_condition": (e2_condition_edge, 1),
}


def cmd_reduce(args) -> int:
    start = time.perf_counter()
    inst = _load(args)
    u, v = inst.vertex(args.src), inst.vertex(args.dst)
    tr = Triple.make(inst.graph, inst.t, u, v, inst.partition)
    if args.op == "all":
        steps = [step for _, step in applicable_sites(tr)]
    else:
        fn, arity = _OPS[args.op]
        if len(args.site) != arity:
            raise UsageError(f"--op {args.op} takes {arity} site id(s), got {len(args.site)}")
        if args.op == "e2_condition":
            vec = tuple(_prob(x) for x in args.pvec.split(",")) if args.pvec else (Fraction(1, 2),) * inst.graph.m
            steps = [fn(HybridTriple(inst.graph, vec, inst.t, u, v), *args.site)]
        else:
            steps = [fn(tr, *args.site)]
    out, lines, ok = [], [], True
    for step in steps:
        rep = verify_reduction(step)
        ok &= rep.ok
        rec = step.to_json()
        rec["verified"] = rep.ok
        rec["checks"] = [{"query": qq, "parent": fraction_str(a), "mix": fraction_str(b)} for qq, a, b in rep.rows]
        out.append(rec)
        weights = ", ".join(fraction_str(w) for _, w in step.children)
        lines.append(f"{step.op} [{step.notes}] -> {len(step.children)} children, weights {weights}: "
                     + ("verified" if rep.ok else "VIOLATION"))
        for qq, a, b in rep.rows:
            lines.append(f"  {qq}: parent {_fmt(a, args.decimal)}  mix {_fmt(b, args.decimal)}")
    if not steps:
        lines.append("no applicable site")
    _emit(args, _timed(args, {"steps": out, "ok": ok}, start), "\n".join(lines))
    return OK if ok else FINDING


def cmd_scan(args) -> int:
    start = time.perf_counter()
    flt = InstanceFilter(max_vertices=args.max_vertices, max_edges=args.max_edges,
                         outerplanar_only=args.outerplanar, multigraph=args.multigraph)
    rep = scan_conjecture(args.model.upper(), flt, p=args.p,
                          constrain=anticorrelated_constraints if args.anticorrelated else None, jobs=args.jobs)
    _emit(args, _timed(args, rep.to_json(), start), rep.to_text())
    return FINDING if rep.violations else OK


def cmd_find_figure2(args) -> int:
    start = time.perf_counter()
    found = find_figure2()
    if args.format == "json":
        payload = json.loads(figure2_json(found))
        payload.pop("schema")
        _emit(args, _timed(args, payload, start), "")
        return OK
    lines = [f"{len(found)} instance(s) with D3 = 13/16 and E3 = 7/8 on both layers"]
    for r in found:
        lines.append(f"  edges {list(r['graph'].edges)}  u={r['u']} v={r['v']} T={sorted(r['t'])}")
    print("\n".join(lines))
    return OK


# --- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bunkbed", description="Exact bunkbed connection probabilities.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="exact probability of a query")
    _add_graph(p), _add_model(p), _add_query(p), _add_output(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("poly", help="connection probability as a polynomial in p (E1, E5)")
    _add_graph(p), _add_model(p, ("e1", "e5")), _add_query(p), _add_output(p)
    p.set_defaults(func=cmd_poly)

    p = sub.add_parser("average", help="E5 probability averaged over all transversal sets")
    _add_graph(p), _add_query(p), _add_output(p)
    p.add_argument("--p", type=_prob, help="evaluate at this red probability")
    p.set_defaults(func=cmd_average)

    p = sub.add_parser("critical", help="roots of the averaged layer difference in [0, 1]")
    _add_graph(p), _add_output(p)
    p.add_argument("--from", dest="src", required=True)
    p.add_argument("--to", dest="dst", required=True)
    p.add_argument("--tol", type=_frac, default=Fraction(1, 10 ** 9))
    p.set_defaults(func=cmd_critical)

    p = sub.add_parser("estimate", help="seeded Monte Carlo estimate")
    _add_graph(p), _add_model(p), _add_query(p), _add_output(p)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("verify-lemmas", help="run the identity and inequality checks on a corpus")
    p.add_argument("--graph", action="append", help="instance file to use instead of the default corpus")
    p.add_argument("--max-vertices", type=int, default=4)
    p.add_argument("--figure2", action="store_true", help="add the reconstructed E3/D3 example")
    p.add_argument("--handcrafted", action="store_true", help="add reductions on handcrafted multigraphs")
    _add_output(p)
    p.set_defaults(func=cmd_verify_lemmas)

    p = sub.add_parser("reduce", help="apply and verify a reduction step")
    _add_graph(p), _add_output(p)
    p.add_argument("--op", required=True, choices=sorted(_OPS) + ["all"])
    p.add_argument("--site", type=int, nargs="*", default=[], help="edge ids (or a vertex id for v2/y)")
    p.add_argument("--from", dest="src", required=True)
    p.add_argument("--to", dest="dst", required=True)
    p.add_argument("--pvec", help="per-edge probabilities for e2_condition")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("scan", help="exhaustive margin scan over small graphs")
    p.add_argument("--model", required=True, type=str.lower, choices=("e1", "e2", "e3", "e5", "d2", "d3"))
    p.add_argument("--max-vertices", type=int, required=True)
    p.add_argument("--max-edges", type=int)
    p.add_argument("--outerplanar", action="store_true")
    p.add_argument("--multigraph", action="store_true")
    p.add_argument("--anticorrelated", action="store_true", help="condition on different colors at degree-2 vertices")
    p.add_argument("--p", type=_prob)
    p.add_argument("--jobs", type=int, default=1)
    _add_output(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("find-figure2", help="search 4-vertex 5-edge graphs for the D3 13/16, E3 7/8 example")
    _add_output(p)
    p.set_defaults(func=cmd_find_figure2)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, GraphError, ModelError, ReductionError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return USAGE


def main() -> None:
    sys.exit(run())

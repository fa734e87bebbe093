"""Command line front end.

Exit codes: 0 success, 1 the requested object was not found or failed
verification, 2 bad usage or malformed input. All JSON output is sorted
and timestamp-free so reruns with the same arguments are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .chord_pipeline import (CycleWitness, find_chordal_cycle, verify_witness,
                             witness_to_dot)
from .cleanup import extract_expander, verify_trajectory_lines
from .errors import ChordwalkError, ExtractionError, GraphFormatError
from .graph_core import (Graph, degree_stats, format_edge_list, is_connected,
                         load_edge_list, two_color)
from .oracle import run_oracle
from .profiles import apply_overrides, get_preset, parse_config, profile_to_dict
from .spectral import (conductance_exact, lambda2, spectral_certificate,
                       verify_mixing)
from .walk_engine import (avoid_event_estimate, cross_edge_tail_estimate,
                          intersection_tail_estimate, parse_trace,
                          self_avoiding_estimate)
from . import models

USAGE_ERROR = 2
NOT_FOUND = 1


def _profile(args):
    prof = get_preset(args.preset)
    if getattr(args, "config", None):
        prof = parse_config(Path(args.config).read_text(encoding="utf-8"), prof)
    if args.set:
        pairs = {}
        for item in args.set:
            if "=" not in item:
                raise ChordwalkError(f"--set expects key=value, got {item!r}")
            key, val = item.split("=", 1)
            pairs[key.strip()] = val.strip()
        prof = apply_overrides(prof, pairs)
    return prof


def _write_text(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_json(args, payload: dict) -> None:
    _write_text(args, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _envelope(args, g: Graph | None, result: dict) -> dict:
    out = {
        "tool_version": __version__,
        "command": args.command,
        "seed": getattr(args, "seed", None),
        "preset": getattr(args, "preset", None),
        "result": result,
    }
    if g is not None:
        out["input_hash"] = g.fingerprint()
    return out


def _avoid_list(raw: str | None) -> list[int]:
    if not raw:
        return []
    return [int(tok) for tok in raw.replace(",", " ").split()]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_generate(args) -> int:
    n, d, p, seed = args.n, args.d, args.p, args.seed
    if args.model == "gnp":
        g = models.gnp_graph(n, p, seed)
    elif args.model == "connected-gnp":
        g = models.connected_gnp_graph(n, p, seed)
    elif args.model == "regular":
        g = models.random_regular_graph(n, d, seed)
    elif args.model == "bipartite-gnp":
        g = models.random_bipartite_graph(n, n, p, seed)
    elif args.model == "shift-regular":
        g = models.shift_regular_bipartite(n, d, seed).graph
    elif args.model == "complete":
        g = models.complete_graph(n)
    elif args.model == "cycle":
        g = models.cycle_graph(n)
    elif args.model == "complete-bipartite":
        g = models.complete_bipartite(n, n)
    else:
        raise ChordwalkError(f"unknown model {args.model!r}")
    header = [f"tool_version={__version__}", f"model={args.model}",
              f"n={n} d={d} p={p} seed={seed}"]
    _write_text(args, format_edge_list(g, header))
    return 0


def cmd_analyze(args) -> int:
    g = load_edge_list(args.input)
    dmin, dmax, avg = degree_stats(g)
    result = {
        "n": g.n, "m": g.m,
        "degree_min": dmin, "degree_max": dmax,
        "degree_avg": float(avg),
        "connected": is_connected(g),
    }
    try:
        two_color(g)
        result["bipartite"] = True
    except ChordwalkError:
        result["bipartite"] = False
    if g.n >= 2 and dmin > 0 and result["connected"]:
        result["lambda2"] = lambda2(g)
        if g.n <= args.exact_limit:
            phi, witness = conductance_exact(g)
            result["conductance"] = float(phi)
            result["conductance_witness"] = list(witness)
    _emit_json(args, _envelope(args, g, result))
    return 0


def cmd_clean(args) -> int:
    g = load_edge_list(args.input)
    prof = _profile(args)
    try:
        ext = extract_expander(g, prof, strict=not args.lenient,
                               exact_limit=args.exact_limit)
    except ExtractionError as exc:
        if args.report and exc.report is not None:
            Path(args.report).write_text(exc.report.to_json_lines(),
                                         encoding="utf-8")
        print(f"extraction failed at stage {exc.stage}: {exc}", file=sys.stderr)
        return NOT_FOUND
    if args.report:
        Path(args.report).write_text(ext.report.to_json_lines(),
                                     encoding="utf-8")
    sub = ext.subgraph.graph
    header = [f"tool_version={__version__}",
              f"input_hash={g.fingerprint()}",
              f"preset={prof.preset}",
              "original_ids=" + ",".join(str(v) for v in ext.mapping)]
    _write_text(args, format_edge_list(sub, header))
    dmin, dmax, avg = degree_stats(sub)
    print(f"kept {sub.n}/{g.n} vertices, {sub.m} edges, "
          f"avg degree {float(avg):.2f}, degree range [{dmin}, {dmax}], "
          f"lambda2 {ext.profile.lambda2:.6f}, "
          f"mixing bound {ext.profile.mixing_time_bound}", file=sys.stderr)
    return 0


def cmd_find_cycle(args) -> int:
    g = load_edge_list(args.input)
    prof = _profile(args)
    out = find_chordal_cycle(g, prof, budget=args.budget, seed=args.seed,
                             threads=args.threads,
                             exact_limit=args.exact_limit)
    if isinstance(out, CycleWitness):
        _emit_json(args, _envelope(args, g, {"witness": out.to_json_dict()}))
        if args.dot:
            Path(args.dot).write_text(witness_to_dot(out), encoding="utf-8")
        return 0
    _emit_json(args, _envelope(args, g, {"failure": out.to_json_dict()}))
    return NOT_FOUND


def cmd_estimate(args) -> int:
    g = load_edge_list(args.input)
    prof = _profile(args)
    avoid = _avoid_list(args.avoid)
    if args.kind == "self-avoiding":
        est = self_avoiding_estimate(g, args.v, args.length, args.trials,
                                     args.seed)
        extra = {}
    elif args.kind == "avoid-event":
        est = avoid_event_estimate(g, args.v, avoid, args.k, args.trials,
                                   args.seed)
        extra = {}
    elif args.kind == "intersection":
        est = intersection_tail_estimate(
            g, avoid, args.length, args.k, args.trials, args.seed, prof,
            start=args.v)
        theta = prof.intersection_threshold(len(avoid), args.length, args.k,
                                            g.n)
        extra = {"theta": theta, "tail_bound": math.exp(-theta)}
    elif args.kind == "cross-edge":
        est = cross_edge_tail_estimate(
            g, args.length, args.k, args.trials, args.seed, prof)
        extra = {"threshold": prof.cross_edge_threshold(
            args.length, 2.0 * g.m / g.n, args.k, g.n)}
    else:
        raise ChordwalkError(f"unknown estimate kind {args.kind!r}")
    result = {"kind": args.kind, "estimate": est.to_json_dict()}
    result.update(extra)
    _emit_json(args, _envelope(args, g, result))
    return 0


def cmd_verify(args) -> int:
    modes = [bool(args.witness), bool(args.report), bool(args.trace),
             bool(args.mixing)]
    if sum(modes) != 1:
        print("verify needs exactly one of --witness, --report, --trace, "
              "--mixing", file=sys.stderr)
        return USAGE_ERROR
    if args.report:
        ok = verify_trajectory_lines(
            Path(args.report).read_text(encoding="utf-8"))
        print("report trajectory: " + ("OK" if ok else "VIOLATION"))
        return 0 if ok else NOT_FOUND
    if not args.input:
        print("this verify mode needs --input", file=sys.stderr)
        return USAGE_ERROR
    g = load_edge_list(args.input)
    if args.witness:
        data = json.loads(Path(args.witness).read_text(encoding="utf-8"))
        if "result" in data:
            data = data["result"]
        if "witness" in data:
            data = data["witness"]
        wit = CycleWitness.from_json_dict(data)
        ok = verify_witness(g, wit)
        print(f"witness: cycle length {len(wit.cycle)}, "
              f"{len(wit.chords)} chords, " + ("OK" if ok else "INVALID"))
        return 0 if ok else NOT_FOUND
    if args.mixing:
        bg = two_color(g)
        ok = verify_mixing(bg, int(args.mixing))
        print(f"mixing at k={args.mixing}: " + ("OK" if ok else "NOT MIXED"))
        return 0 if ok else NOT_FOUND
    trace = parse_trace(Path(args.trace).read_text(encoding="utf-8"))
    nbr = g.neighbor_sets()
    walk = [trace.start, *trace.steps]
    edges_ok = all(b in nbr[a] for a, b in zip(walk, walk[1:]))
    distinct = len(set(walk)) == len(walk)
    ok = edges_ok and distinct
    print(f"trace: {len(trace.steps)} steps, edges "
          + ("OK" if edges_ok else "BROKEN") + ", "
          + ("self-avoiding" if distinct else "revisits"))
    return 0 if ok else NOT_FOUND


def cmd_oracle(args) -> int:
    g = load_edge_list(args.input)
    params = {}
    if args.v is not None:
        params["v"] = args.v
    if args.length is not None:
        params["length"] = args.length
    if args.k is not None:
        params["k"] = args.k
    if args.avoid:
        params["avoid"] = _avoid_list(args.avoid)
    res = run_oracle(args.kind.replace("-", "_"), g, **params)
    _emit_json(args, _envelope(args, g, res.to_json_dict()))
    return 0


def cmd_certify(args) -> int:
    g = load_edge_list(args.input)
    bg = two_color(g)
    sp = spectral_certificate(bg, args.k_almost)
    result = {"certificate": sp.to_json_dict()}
    _emit_json(args, _envelope(args, g, result))
    return 0


def cmd_profile(args) -> int:
    prof = _profile(args)
    d = profile_to_dict(prof)
    sample_n = args.n
    d["derived"] = {
        "n": sample_n,
        "expander_lambda": prof.expander_lambda_at(sample_n),
        "lambda_step": prof.lambda_step_at(sample_n),
        "min_avg_degree": prof.min_avg_degree_at(sample_n),
        "almost_reg_divisor": prof.almost_reg_divisor_at(sample_n),
        "total_divisor": prof.total_divisor_at(sample_n),
    }
    _emit_json(args, _envelope(args, None, d))
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_common(p, seed=True, preset=True, output=True):
    if seed:
        p.add_argument("--seed", type=int, default=0)
    if preset:
        p.add_argument("--preset", choices=["paper", "desk"], default="desk")
        p.add_argument("--set", action="append", default=[],
                       metavar="KEY=VALUE",
                       help="override one profile constant (repeatable)")
        p.add_argument("--config", help="key=value file applied before --set")
    if output:
        p.add_argument("--output", "-o", help="write here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="chordwalk",
        description="find cycles with many chords in dense graphs")
    ap.add_argument("--version", action="version",
                    version=f"chordwalk {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a model graph as an edge list")
    p.add_argument("--model", required=True,
                   choices=["gnp", "connected-gnp", "regular", "bipartite-gnp",
                            "shift-regular", "complete", "cycle",
                            "complete-bipartite"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, default=0)
    p.add_argument("--p", type=float, default=0.0)
    _add_common(p, preset=False)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("analyze", help="degree and spectral summary")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--exact-limit", type=int, default=20)
    _add_common(p, seed=False, preset=False)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("clean", help="extract an almost-regular expander")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--report", help="write the JSONL step report here")
    p.add_argument("--lenient", action="store_true",
                   help="keep going when the average degree is under the floor")
    p.add_argument("--exact-limit", type=int, default=24)
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("find-cycle",
                       help="search for a cycle with as many chords as vertices")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--budget", type=int, default=1000)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--exact-limit", type=int, default=24)
    p.add_argument("--dot", help="also write a graphviz rendering here")
    _add_common(p)
    p.set_defaults(func=cmd_find_cycle)

    p = sub.add_parser("estimate", help="Monte Carlo walk event estimates")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--kind", required=True,
                   choices=["self-avoiding", "avoid-event", "intersection",
                            "cross-edge"])
    p.add_argument("--v", type=int, default=0, help="start vertex")
    p.add_argument("--length", type=int, default=8, help="walk length t")
    p.add_argument("--k", type=int, default=1, help="mixing parameter")
    p.add_argument("--avoid", help="comma-separated vertex set")
    p.add_argument("--trials", type=int, default=1000)
    _add_common(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("verify", help="check witnesses, reports, traces")
    p.add_argument("--input", "-i")
    p.add_argument("--witness", help="witness JSON to check against --input")
    p.add_argument("--report", help="cleanup JSONL report to check")
    p.add_argument("--trace", help="walk trace to check against --input")
    p.add_argument("--mixing", help="verify mixing at this k against --input")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="exact small-graph enumeration answers")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--kind", required=True,
                   choices=["max-chord-surplus", "self-avoiding",
                            "avoid-event", "walk-matrix"])
    p.add_argument("--v", type=int)
    p.add_argument("--length", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--avoid")
    _add_common(p, seed=False, preset=False)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("certify", help="spectral certificate for a bipartite host")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--k-almost", type=float, default=100.0)
    _add_common(p, seed=False, preset=False)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("profile", help="print the resolved constants profile")
    p.add_argument("--n", type=int, default=1000,
                   help="sample size for the derived values")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_profile)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (GraphFormatError, ChordwalkError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))

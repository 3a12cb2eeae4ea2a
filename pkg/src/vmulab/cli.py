"""Command line: ``python -m vmulab <command> ...``.

Exit codes: 0 property holds, 1 refuted, 2 unknown, 64 usage error,
65 unreadable input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings
from datetime import datetime, timezone
from fractions import Fraction

from . import graph6
from .bounds import bounds_report
from .construct import (
    construction_params,
    erdos_renyi,
    feasibility_report,
    multipartite,
    smallest_feasible_k,
)
from .graph import Graph, GraphError, make_named
from .orbit import (
    Certificate,
    certificate_problem,
    check_pairable_clocc,
    check_vmu,
    is_vertex_minor,
)
from .stabsim import run_certificate_protocol

EXIT_YES, EXIT_NO, EXIT_UNKNOWN = 0, 1, 2
EXIT_USAGE, EXIT_PARSE = 64, 65
VERDICT_EXIT = {"yes": EXIT_YES, "no": EXIT_NO, "unknown": EXIT_UNKNOWN}

SAMPLE_MAX_ORDER = 5000


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def default_threads() -> int:
    env = os.environ.get("VMULAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"VMULAB_THREADS must be an integer, got {env!r}")
    return os.cpu_count() or 1


# graph input ----------------------------------------------------------------


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", help="named graph: k2, k3, cycle:6, path:4, wheel10, petersen, paley:13, ...")
    src.add_argument("--graph6", help="graph6 string")
    src.add_argument("--graph-file", help="file holding a graph6 line or the JSON graph format")


def load_graph(args) -> Graph:
    try:
        if args.graph is not None:
            return make_named(args.graph)
        if args.graph6 is not None:
            return graph6.decode(args.graph6)
        with open(args.graph_file, encoding="utf-8") as fh:
            text = fh.read().strip()
        if text.startswith("{"):
            return Graph.from_json(text)
        return graph6.decode(text.splitlines()[0])
    except (GraphError, graph6.Graph6Error, OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def _vertex_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise InputError(f"bad vertex list {text!r}")


def _edge_list(text: str | None) -> list[tuple[int, int]]:
    if not text:
        return []
    out = []
    for item in text.replace(",", " ").split():
        try:
            a, b = item.split("-")
            out.append((int(a), int(b)))
        except ValueError:
            raise InputError(f"bad edge {item!r}; expected a-b")
    return out


# output -------------------------------------------------------------------------


def _emit(payload: dict, args, csv_text: str | None = None, text: str | None = None) -> None:
    fmt = getattr(args, "format", "json")
    if fmt == "csv" and csv_text is not None:
        out = csv_text
    elif fmt == "text" and text is not None:
        out = text + "\n"
    else:
        if not args.no_timestamp:
            payload = {**payload, "timestamp": datetime.now(timezone.utc).isoformat()}
        out = json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n"
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _json_default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if hasattr(obj, "to_json"):
        return obj.to_json()
    raise TypeError(f"not serializable: {type(obj).__name__}")


# commands -------------------------------------------------------------------------


def cmd_analyze(args) -> int:
    g = load_graph(args)
    rep = bounds_report(g)
    payload = {"graph6": graph6.encode(g), **rep.to_json()}
    text = "\n".join(f"{k}: {v}" for k, v in payload.items())
    _emit(payload, args, text=text)
    return EXIT_YES


def _sweep_kwargs(args) -> dict:
    if args.mode == "randomized" and args.seed is None:
        raise UsageError("--seed is required with --mode randomized")
    return {
        "mode": args.mode,
        "budget": args.budget,
        "seed": 0 if args.seed is None else args.seed,
        "threads": args.threads or default_threads(),
        "keep_outcomes": not args.summary,
    }


def cmd_check(args) -> int:
    g = load_graph(args)
    fn = check_vmu if args.property == "vmu" else check_pairable_clocc
    try:
        rep = fn(g, args.k, **_sweep_kwargs(args))
    except GraphError as exc:
        raise UsageError(str(exc))
    payload = rep.to_json(with_outcomes=not args.summary)
    payload.pop("wall_time")
    if args.timing:
        payload["wall_time"] = rep.wall_time
    text = (
        f"{args.property} k={args.k}: {rep.verdict} "
        f"({rep.certified} certified, {rep.failed} failed, {rep.unknown} unknown of {rep.total})"
        + (f" excluded by {rep.excluded_by}" if rep.excluded_by else "")
    )
    _emit(payload, args, csv_text=rep.to_csv(), text=text)
    return VERDICT_EXIT[rep.verdict]


def cmd_certify(args) -> int:
    g = load_graph(args)
    verts = _vertex_list(args.target_vertices)
    try:
        h = Graph.from_edges(g.order, _edge_list(args.target_edges), active=verts)
    except GraphError as exc:
        raise InputError(str(exc))
    if args.mode == "randomized" and args.seed is None:
        raise UsageError("--seed is required with --mode randomized")
    try:
        out = is_vertex_minor(g, h, mode=args.mode, budget=args.budget, seed=args.seed or 0)
    except GraphError as exc:
        raise UsageError(str(exc))
    payload = out.to_json()
    if out.certificate is not None and not args.wrap:
        payload = out.certificate.to_json()
    _emit(payload, args)
    return {"found": EXIT_YES, "exhausted_no": EXIT_NO}.get(out.verdict, EXIT_UNKNOWN)


def cmd_verify(args) -> int:
    g = load_graph(args)
    try:
        with open(args.certificate, encoding="utf-8") as fh:
            data = json.load(fh)
        cert = Certificate.from_json(data.get("certificate", data) if "lc" not in data else data)
    except (OSError, json.JSONDecodeError, GraphError, AttributeError) as exc:
        raise InputError(str(exc))
    problem = certificate_problem(g, cert)
    payload = {"graph_replay": problem is None, "problem": problem}
    ok = problem is None
    if args.quantum and ok:
        run = run_certificate_protocol(g, cert, seed=args.seed)
        payload["quantum"] = run.to_json()
        ok = run.verdict
    payload["verdict"] = ok
    _emit(payload, args, text=f"verdict: {ok}" + (f" ({problem})" if problem else ""))
    return EXIT_YES if ok else EXIT_NO


# the yes/no grid, columns in the order of the published table
TABLE_COLUMNS = [("pairable", 1), ("vmu", 2), ("vmu", 3), ("pairable", 2), ("vmu", 4), ("vmu", 5), ("pairable", 3)]
TABLE_ROWS = ["k2", "k3", "cycle:6", "wheel10", "petersen", "paley:13"]
EXTENDED_ROWS = ["paley:17", "paley:29"]
OUT_OF_SCOPE = {("paley:13", "vmu", 5)}


def table_rows(extended: bool = False, budget: int = 2_000_000, seed: int = 0, threads: int = 1) -> list[dict]:
    rows = []
    for name in TABLE_ROWS + (EXTENDED_ROWS if extended else []):
        g = make_named(name)
        rep = bounds_report(g)
        row = {"graph": name, "order": g.num_vertices(), "delta_loc": rep.delta_loc}
        for prop, k in TABLE_COLUMNS:
            col = f"{k}-{'p' if prop == 'pairable' else 'vmu'}"
            need = 2 * k if prop == "pairable" else k
            if need > g.num_vertices():
                row[col] = ""
                continue
            if (name, prop, k) in OUT_OF_SCOPE:
                row[col] = "unknown (out of scope)"
                continue
            fn = check_vmu if prop == "vmu" else check_pairable_clocc
            r = fn(g, k, budget=budget, seed=seed, threads=threads, keep_outcomes=False)
            cell = r.verdict
            if r.excluded_by:
                cell += f" [{r.excluded_by}]"
            elif r.verdict == "no":
                cell += " [orbit]"
            row[col] = cell
        rows.append(row)
    return rows


def cmd_table(args) -> int:
    rows = table_rows(args.extended, args.budget, args.seed or 0, args.threads or default_threads())
    cols = list(rows[0])
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols)
    w.writeheader()
    w.writerows(rows)
    widths = {c: max(len(c), *(len(str(r[c])) for r in rows)) for c in cols}
    lines = ["  ".join(c.ljust(widths[c]) for c in cols)]
    lines += ["  ".join(str(r[c]).ljust(widths[c]) for c in cols) for r in rows]
    _emit({"rows": rows}, args, csv_text=buf.getvalue(), text="\n".join(lines))
    return EXIT_YES


def cmd_construct(args) -> int:
    constants = {}
    if args.kind == "vmu" and args.c is not None:
        constants["c"] = args.c
    if args.kind == "pairable":
        if args.c1 is not None:
            constants["c1"] = args.c1
        if args.c2 is not None:
            constants["c2"] = args.c2
    payload: dict = {"kind": args.kind, "k": args.k}
    caught: list[str] = []
    with warnings.catch_warnings(record=True) as wlist:
        warnings.simplefilter("always")
        try:
            params = construction_params(args.kind, args.k, **constants)
        except GraphError as exc:
            raise UsageError(str(exc))
        caught = [str(w.message) for w in wlist]
    payload["params"] = params.to_json()
    payload["warnings"] = caught
    payload["feasibility"] = feasibility_report(params).to_json()
    payload["feasibility"].pop("params")
    if args.smallest:
        payload["smallest_feasible_k"] = smallest_feasible_k(args.kind, **constants)
    if args.sample:
        if args.seed is None:
            raise UsageError("--seed is required with --sample")
        if args.kind == "vmu":
            m = args.m if args.m is not None else params.m
            p = args.p if args.p is not None else float(params.p)
            n = m * (args.k + 1)
        else:
            n = args.n if args.n is not None else params.n
            p = args.p if args.p is not None else float(params.p)
        if n > SAMPLE_MAX_ORDER:
            raise UsageError(f"sampling {n} vertices exceeds the {SAMPLE_MAX_ORDER}-vertex limit; pass smaller --m/--n")
        if args.kind == "vmu":
            g = multipartite(args.k + 1, m, p, args.seed)
        else:
            g = erdos_renyi(n, p, args.seed)
        payload["sample"] = {"order": g.order, "edges": g.num_edges(), "p": p, "seed": args.seed, "graph6": graph6.encode(g)}
    _emit(payload, args)
    return EXIT_YES


# parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vmulab", description="Graph-state pairability and vertex-minor universality toolkit.")
    parser.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field from JSON output")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, formats=("json", "text")):
        p.add_argument("--format", choices=formats, default="json")
        p.add_argument("--output", "-o", help="write to a file instead of stdout")
        p.add_argument("--no-timestamp", action="store_true", default=argparse.SUPPRESS)

    def search(p):
        p.add_argument("--budget", type=int, default=2_000_000, help="random-walk LC budget / BFS orbit limit")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None, help="worker threads (default: VMULAB_THREADS or CPU count)")

    p = sub.add_parser("analyze", help="local minimum degree, vertex cover and derived bounds")
    _add_graph_args(p)
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("check", help="decide k-vmu or k-pairability by orbit search")
    p.add_argument("property", choices=["vmu", "pairable"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", choices=["auto", "greedy", "randomized", "exhaustive"], default="auto")
    p.add_argument("--summary", action="store_true", help="omit per-target outcomes")
    p.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identical output)")
    _add_graph_args(p)
    search(p)
    common(p, ("json", "csv", "text"))
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("certify", help="find a certificate for one target graph")
    _add_graph_args(p)
    p.add_argument("--target-vertices", required=True, help="e.g. 0,3")
    p.add_argument("--target-edges", default="", help="e.g. 0-3 (empty for an independent set)")
    p.add_argument("--mode", choices=["exhaustive", "randomized", "greedy"], default="exhaustive")
    p.add_argument("--wrap", action="store_true", help="emit the full search outcome, not just the certificate")
    search(p)
    common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", help="replay a certificate")
    _add_graph_args(p)
    p.add_argument("--certificate", required=True, help="certificate JSON file")
    p.add_argument("--quantum", action="store_true", help="also replay the protocol on a stabilizer tableau")
    p.add_argument("--seed", type=int, default=None, help="measurement randomness for --quantum")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("table", help="reproduce the pairability / vmu grid")
    p.add_argument("--extended", action="store_true", help="add paley:17 and paley:29 (long running)")
    search(p)
    common(p, ("json", "csv", "text"))
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("construct", help="construction parameters, feasibility and optional sample")
    p.add_argument("kind", choices=["vmu", "pairable"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--c", type=float, help="vmu constant")
    p.add_argument("--c1", type=float, help="pairable constant for t")
    p.add_argument("--c2", type=float, help="pairable constant for n")
    p.add_argument("--m", type=int, help="block size override for sampling (vmu)")
    p.add_argument("--n", type=int, help="order override for sampling (pairable)")
    p.add_argument("--p", type=float, help="edge probability override for sampling")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--sample", action="store_true", help="draw a graph and print it as graph6")
    p.add_argument("--smallest", action="store_true", help="also report the smallest k with d*p0 < 1")
    common(p)
    p.set_defaults(func=cmd_construct)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help or a usage error
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if not hasattr(args, "no_timestamp"):
        args.no_timestamp = False
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"vmulab: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"vmulab: cannot read input: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())

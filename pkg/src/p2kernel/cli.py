"""Command-line front end.

Instance files are DIMACS-like text with 1-based vertex ids::

    c optional comment
    p p2pack <n> <m>
    e <u> <v>
    k <int>            (optional)

Exit codes: 0 done or YES, 1 NO or failed verification, 2 parse error,
3 internal assertion, 4 undecided (kernel too large for the oracle).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from .errors import InvariantViolation, OracleLimitError, ParseError
from .graph import Graph
from .kernelize import TRIVIAL_NO, TRIVIAL_YES, KernelResult, kernelize, lift_solution
from .packing import P2Packing, exact_opt, oracle_limit, packing_violation
from .reduce import TraceEntry

EXIT_OK = 0
EXIT_NO = 1
EXIT_PARSE = 2
EXIT_INTERNAL = 3
EXIT_UNDECIDED = 4


# -- instance files ----------------------------------------------------------


@dataclass(frozen=True)
class Instance:
    graph: Graph
    n: int
    k: int | None = None


def parse_instance(text: str) -> Instance:
    n = m = None
    k = None
    edges: set[tuple[int, int]] = set()
    count = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        tag = parts[0]
        try:
            if tag == "p":
                if n is not None:
                    raise ParseError(f"line {lineno}: second header")
                if len(parts) != 4 or parts[1] != "p2pack":
                    raise ParseError(f"line {lineno}: expected 'p p2pack <n> <m>'")
                n, m = int(parts[2]), int(parts[3])
                if n < 0 or m < 0:
                    raise ParseError(f"line {lineno}: negative size")
            elif tag == "e":
                if n is None:
                    raise ParseError(f"line {lineno}: edge before header")
                if len(parts) != 3:
                    raise ParseError(f"line {lineno}: expected 'e <u> <v>'")
                u, v = int(parts[1]), int(parts[2])
                if not (1 <= u <= n and 1 <= v <= n):
                    raise ParseError(f"line {lineno}: endpoint outside 1..{n}")
                if u == v:
                    raise ParseError(f"line {lineno}: self-loop at {u}")
                key = (min(u, v) - 1, max(u, v) - 1)
                if key in edges:
                    raise ParseError(f"line {lineno}: duplicate edge {u} {v}")
                edges.add(key)
                count += 1
            elif tag == "k":
                if len(parts) != 2:
                    raise ParseError(f"line {lineno}: expected 'k <int>'")
                k = int(parts[1])
            else:
                raise ParseError(f"line {lineno}: unknown line type {tag!r}")
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"line {lineno}: {exc}") from None
    if n is None:
        raise ParseError("missing 'p p2pack' header")
    if count != m:
        raise ParseError(f"header declares {m} edges, found {count}")
    return Instance(Graph.from_edges(sorted(edges), range(n)), n, k)


def format_instance(g: Graph, k: int | None = None, comment: str | None = None) -> str:
    """Serialize ``g`` with its vertices relabelled 1..n in ascending order."""
    index = {v: i + 1 for i, v in enumerate(g.vertices)}
    lines = []
    if comment:
        lines.append(f"c {comment}")
    lines.append(f"p p2pack {len(g)} {g.num_edges()}")
    lines += [f"e {index[u]} {index[v]}" for u, v in g.edges()]
    if k is not None:
        lines.append(f"k {k}")
    return "\n".join(lines) + "\n"


def parse_packing(text: str) -> P2Packing:
    paths = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        if len(parts) != 3:
            raise ParseError(f"line {lineno}: expected three vertex ids")
        try:
            ids = [int(x) - 1 for x in parts]
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer vertex id") from None
        paths.append(tuple(ids))
    return P2Packing.of(paths)


def format_packing(p: Iterable[Sequence[int]]) -> str:
    return "".join(" ".join(str(v + 1) for v in path) + "\n" for path in p)


def trace_records(result: KernelResult) -> list[dict]:
    """Trace entries and the closing kernel record, with 1-based ids."""
    out = []
    for e in result.trace:
        rec = {
            "rule": e.rule,
            "removed": [v + 1 for v in e.removed],
            "k_decrement": e.k_decrement,
            "harvested_paths": [[v + 1 for v in p] for p in e.harvested_paths],
        }
        if e.via:
            rec["via"] = e.via
        out.append(rec)
    out.append(
        {
            "kernel": {
                "kind": result.kind,
                "k": result.k,
                "original_k": result.original_k,
                "vertices": [v + 1 for v in result.graph.vertices],
            }
        }
    )
    return out


def parse_trace(text: str) -> tuple[list[TraceEntry], dict]:
    entries: list[TraceEntry] = []
    meta = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            continue
        try:
            rec = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"trace line {lineno}: {exc}") from None
        if "kernel" in rec:
            meta = rec["kernel"]
            continue
        try:
            e = TraceEntry.from_dict(rec)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"trace line {lineno}: malformed entry ({exc})") from None
        entries.append(
            TraceEntry(
                e.rule,
                tuple(v - 1 for v in e.removed),
                e.k_decrement,
                tuple(tuple(v - 1 for v in p) for p in e.harvested_paths),  # type: ignore[misc]
                e.via,
            )
        )
    if meta is None:
        raise ParseError("trace has no closing kernel record")
    return entries, meta


def _violation_in_file_ids(g: Graph, paths: Iterable[Sequence[int]]) -> str | None:
    """``packing_violation`` with messages in 1-based ids."""
    g1 = Graph.from_edges([(u + 1, v + 1) for u, v in g.edges()], [v + 1 for v in g.vertices])
    return packing_violation(g1, [tuple(v + 1 for v in path) for path in paths])


def check_trace(g: Graph, k: int, entries: list[TraceEntry], meta: dict) -> list[str]:
    """Re-check a trace against the input graph; returns the problems found."""
    problems = []
    removed: set[int] = set()
    for i, e in enumerate(entries):
        here = set(e.removed)
        if here & removed:
            problems.append(f"entry {i}: vertex {min(here & removed) + 1} removed twice")
        if not here <= set(g.vertices):
            problems.append(f"entry {i}: removes unknown vertices")
            continue
        removed |= here
        if len(e.harvested_paths) != e.k_decrement:
            problems.append(f"entry {i}: {len(e.harvested_paths)} paths for decrement {e.k_decrement}")
        why = _violation_in_file_ids(g.induced(here), e.harvested_paths)
        if why is not None:
            problems.append(f"entry {i}: {why}")
    kprime = meta.get("k")
    if meta.get("original_k") != k:
        problems.append(f"trace was produced for k={meta.get('original_k')}, not {k}")
    if kprime is None or sum(e.k_decrement for e in entries) != k - kprime:
        problems.append("decrements do not sum to k - k'")
    rest = sorted(v + 1 for v in g.vertices if v not in removed)
    if rest != meta.get("vertices"):
        problems.append("kernel vertex list does not match the vertices left after removals")
    return problems


# -- commands ------------------------------------------------------------


def _read_instance(path: str | None) -> Instance:
    text = sys.stdin.read() if path in (None, "-") else Path(path).read_text()  # type: ignore[arg-type]
    return parse_instance(text)


def _need_k(args, inst: Instance) -> int:
    k = args.k if args.k is not None else inst.k
    if k is None:
        raise ParseError("no k given (use --k or a 'k' line)")
    return k


def _write(path: str | None, text: str, out: TextIO) -> None:
    if path in (None, "-"):
        out.write(text)
    else:
        Path(path).write_text(text)  # type: ignore[arg-type]


def cmd_kernelize(args, out: TextIO) -> int:
    inst = _read_instance(args.input)
    k = _need_k(args, inst)
    r = kernelize(inst.graph, k)
    g, kk = output_instance(r)
    _write(args.output, format_instance(g, kk, comment=f"kernel {r.kind}"), out)
    if args.trace:
        Path(args.trace).write_text("".join(json.dumps(rec) + "\n" for rec in trace_records(r)))
    ok = len(g) <= 5 * kk
    print(f"n'={len(g)} k'={kk} bound={5 * kk} ok={str(ok).lower()} kind={r.kind}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_INTERNAL


def output_instance(r: KernelResult) -> tuple[Graph, int]:
    """The instance written for a result: trivial answers become (empty, 0) or (empty, 1)."""
    if r.kind == TRIVIAL_YES:
        return Graph(), 0
    if r.kind == TRIVIAL_NO:
        return Graph(), 1
    return r.graph, r.k


def solve(g: Graph, k: int, limit: int) -> tuple[str, P2Packing | None]:
    """Kernelize, then solve the kernel exactly and lift; returns (verdict, packing)."""
    r = kernelize(g, k)
    if r.kind == TRIVIAL_NO:
        return "NO", None
    if r.kind == TRIVIAL_YES:
        return "YES", lift_solution(r.trace, r.witness or P2Packing(), k, g)
    if len(r.graph) > limit:
        return "UNDECIDED", None
    value, witness = exact_opt(r.graph, limit)
    if value < r.k:
        return "NO", None
    return "YES", lift_solution(r.trace, witness, k, g)


def cmd_solve(args, out: TextIO) -> int:
    inst = _read_instance(args.input)
    k = _need_k(args, inst)
    limit = args.oracle_limit if args.oracle_limit is not None else oracle_limit()
    verdict, packing = solve(inst.graph, k, limit)
    if verdict == "UNDECIDED":
        out.write(f"UNDECIDED kernel exceeds oracle limit {limit} (undecided at desk scale)\n")
        return EXIT_UNDECIDED
    out.write(verdict + "\n")
    if packing is None:
        return EXIT_NO
    text = format_packing(packing)
    if args.output:
        Path(args.output).write_text(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_verify(args, out: TextIO) -> int:
    inst = _read_instance(args.input)
    problems: list[str] = []
    if args.packing:
        p = parse_packing(Path(args.packing).read_text())
        why = _violation_in_file_ids(inst.graph, p.paths)
        if why is not None:
            problems.append(why)
        k = args.k if args.k is not None else inst.k
        if k is not None and len(p) < k:
            problems.append(f"packing has {len(p)} paths, needed {k}")
    if args.trace:
        entries, meta = parse_trace(Path(args.trace).read_text())
        k = args.k if args.k is not None else inst.k
        if k is None:
            k = meta.get("original_k")
        problems += check_trace(inst.graph, k, entries, meta)
    if not args.packing and not args.trace:
        raise ParseError("verify needs --packing or --trace")
    for msg in problems:
        out.write(f"FAIL {msg}\n")
    if problems:
        return EXIT_NO
    out.write("OK\n")
    return EXIT_OK


def random_graph(n: int, seed: int, m: int | None = None, p: float | None = None) -> Graph:
    """Uniform G(n, m) or G(n, p) graph, deterministic per seed."""
    rng = random.Random(seed)
    pairs = list(combinations(range(n), 2))
    if m is not None:
        if not 0 <= m <= len(pairs):
            raise ValueError(f"cannot place {m} edges on {n} vertices")
        edges = rng.sample(pairs, m)
    else:
        if p is None or not 0 <= p <= 1:
            raise ValueError("edge probability must lie in [0, 1]")
        edges = [e for e in pairs if rng.random() < p]
    return Graph.from_edges(edges, range(n))


def cmd_gen(args, out: TextIO) -> int:
    if args.n < 0:
        raise ParseError("n must be non-negative")
    if (args.m is None) == (args.p is None):
        raise ParseError("give exactly one of --m and --p")
    try:
        g = random_graph(args.n, args.seed, m=args.m, p=args.p)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    _write(args.output, format_instance(g, args.k, comment=f"seed {args.seed}"), out)
    return EXIT_OK


def cmd_stats(args, out: TextIO) -> int:
    from . import report

    if args.batch:
        rows = report.run_batch(args.batch, args.seed, args.k)
        outdir = Path(args.output or ".")
        csv_path, png_path = report.write_report(rows, outdir)
        out.write(f"wrote {csv_path} and {png_path}\n")
        bad = sum(1 for r in rows if not r["ok"])
        return EXIT_OK if bad == 0 else EXIT_INTERNAL
    inst = _read_instance(args.input)
    k = _need_k(args, inst)
    for key, value in report.instance_stats(inst.graph, k).items():
        out.write(f"{key}={value}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="p2k", description="Kernelization for P2-packing.")
    sub = ap.add_subparsers(dest="verb", required=True)

    def common(p, output=True):
        p.add_argument("--input", "-i", help="instance file ('-' for stdin)")
        p.add_argument("--k", type=int, help="packing size (overrides the file's k line)")
        if output:
            p.add_argument("--output", "-o", help="output file (default stdout)")

    p = sub.add_parser("kernelize", help="reduce an instance and write the kernel")
    common(p)
    p.add_argument("--trace", help="write the reduction trace (JSON lines) here")
    p.set_defaults(func=cmd_kernelize)

    p = sub.add_parser("solve", help="decide an instance via kernel + exact search")
    common(p)
    p.add_argument("--oracle-limit", type=int, help="largest kernel handed to the exact search")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a packing or a trace against an instance")
    common(p, output=False)
    p.add_argument("--packing", help="packing file, one 'u v w' per line")
    p.add_argument("--trace", help="trace file produced by kernelize")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("stats", help="instance statistics, or a batch report with a plot")
    common(p)
    p.add_argument("--batch", type=int, help="run this many random instances instead")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_stats)
    return ap


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OracleLimitError as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    except (InvariantViolation, AssertionError) as exc:
        print(f"internal assertion: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

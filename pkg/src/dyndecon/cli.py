"""Command line: generate, run, verify-trace, experiment."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .experiment import load_matrix, run_matrix, summary_table
from .generators import BadParams, generate
from .graph import dumps
from .scenario import ConfigError, load_scenario, resolve_budget, run_scenario, structure
from .verify import CorruptTrace, verify_trace

OUT_ENV = "DYNDECON_OUT"


def _out_dir(arg: str | None) -> Path:
    path = Path(arg or os.environ.get(OUT_ENV) or ".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _kv(text: str) -> tuple[str, str]:
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    return key.strip(), value.strip()


def cmd_generate(args) -> int:
    try:
        fp = generate(args.family, dict(args.param), args.seed)
    except BadParams as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = dumps(fp)
    if args.out:
        Path(args.out).write_text(text)
        n, d, k = structure(fp)
        print(f"wrote {args.out}: n={n} m={fp.m} d={d} k={k}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_run(args) -> int:
    try:
        sc = load_scenario(args.scenario)
    except (ConfigError, BadParams, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.seed is not None:
        sc.seed = args.seed
    if args.max_rounds is not None:
        sc.max_rounds = args.max_rounds
    if args.stall_window is not None:
        sc.stall_window = args.stall_window
    if args.agents is not None:
        sc.agents = int(args.agents) if args.agents.isdigit() else args.agents
    n, d, k = structure(sc.footprint)
    agents = resolve_budget(sc.agents, n, d, k)
    print(f"scenario {sc.name}: n={n} d={d} k={k} agents {sc.agents} -> {agents}", file=sys.stderr)
    trace, row, _ = run_scenario(sc, agents)
    path = _out_dir(args.out) / f"{sc.name}.trace.ndjson"
    trace.write(path)
    print(row.to_json())
    print(f"trace: {path}", file=sys.stderr)
    return row.exit_code


def cmd_verify(args) -> int:
    try:
        report = verify_trace(args.trace)
    except (CorruptTrace, OSError) as exc:
        print(f"corrupt trace: {exc}", file=sys.stderr)
        return 1
    if report.ok:
        print(f"ok: {report.rounds} rounds, monotone")
        return 0
    print(f"FAILED at {report.first}")
    for d in report.issues[1:args.max_issues]:
        print(f"  also {d}")
    return 1


def cmd_experiment(args) -> int:
    try:
        cells, opts = load_matrix(args.matrix)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    workers = args.workers or opts["workers"]
    rows = run_matrix(cells, workers)
    out = _out_dir(args.out) / f"{Path(args.matrix).stem}.metrics.ndjson"
    out.write_text("".join(r.to_json() + "\n" for r in rows))
    print(summary_table(rows, opts.get("note")))
    print(f"metrics: {out} ({len(rows)} cells)", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dyndecon", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("generate", help="emit a footprint")
    g.add_argument("family")
    g.add_argument("--param", "-p", type=_kv, action="append", default=[], help="family parameter key=value")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(fn=cmd_generate)

    r = sub.add_parser("run", help="run one scenario file")
    r.add_argument("--scenario", required=True)
    r.add_argument("--seed", type=int)
    r.add_argument("--max-rounds", type=int)
    r.add_argument("--stall-window", type=int)
    r.add_argument("--agents", help="count or formula such as d+2k")
    r.add_argument("--out", help=f"trace directory (default ${OUT_ENV} or .)")
    r.set_defaults(fn=cmd_run)

    v = sub.add_parser("verify-trace", help="re-check a trace without the engine")
    v.add_argument("trace")
    v.add_argument("--max-issues", type=int, default=10)
    v.set_defaults(fn=cmd_verify)

    e = sub.add_parser("experiment", help="run a matrix file")
    e.add_argument("--matrix", required=True)
    e.add_argument("--workers", type=int)
    e.add_argument("--out")
    e.set_defaults(fn=cmd_experiment)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())

"""Command line entry point: ``courant check <scenario> [--seed N] [--format text|json]``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .scenario import CHECKS, RunReport, ScenarioError, load_scenario, run_scenario, shipped_scenarios

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def resolve_scenario(name: str) -> Path:
    """A path to a JSON file, or the stem of a shipped scenario."""
    p = Path(name)
    if p.exists() or p.suffix == ".json":
        return p
    for s in shipped_scenarios():
        if s.stem == name:
            return s
    return p


def format_text(run: RunReport) -> str:
    lines = [f"scenario {run.scenario} (seed {run.seed})"]
    for res in run.results:
        rep = res.report
        lines.append(f"[{rep.status.upper()}] {res.label} ({res.kind})")
        for e in rep.entries:
            tag = e.status.upper() + ("*" if e.informational else "")
            line = f"    {tag:<6} {e.id}"
            if e.detail and e.status == "skip":
                line += f": {e.detail}"
            lines.append(line)
            if e.witness is not None and e.status == "fail":
                where = f" at ({', '.join(e.witness.where)})" if e.witness.where else ""
                lines.append(f"           witness{where}: {e.witness.expr}")
    n_fail = sum(1 for r in run.results if not r.report.passed)
    lines.append(f"overall: {run.status.upper()} ({len(run.results) - n_fail}/{len(run.results)} checks passed)")
    if any(e.informational for r in run.results for e in r.report.entries):
        lines.append("(* informational entry, not counted in the verdict)")
    return "\n".join(lines) + "\n"


def list_checks() -> str:
    width = max(len(k) for k in CHECKS)
    out = []
    for kind, info in CHECKS.items():
        args = ", ".join(a if a in info.required else f"[{a}]" for a in info.args)
        out.append(f"{kind:<{width}}  {info.summary}\n{'':<{width}}  args: {args}")
        if info.options:
            out.append(f"{'':<{width}}  options: {', '.join(info.options)}, seed")
    return "\n".join(out) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="courant", description="Exact checks for Courant algebroids and 1-derivations.")
    sub = parser.add_subparsers(dest="command")
    check = sub.add_parser("check", help="run a scenario file")
    check.add_argument("scenario", nargs="?", help="scenario JSON file or shipped scenario name")
    check.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    check.add_argument("--format", choices=("text", "json"), default="text")
    check.add_argument("--list-checks", action="store_true", help="list check kinds and exit")
    check.add_argument("--timings", action="store_true", help="include per-check wall time in JSON output")
    sub.add_parser("list", help="list shipped scenarios")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "list":
        for p in shipped_scenarios():
            sys.stdout.write(p.stem + "\n")
        return EXIT_PASS
    if args.command != "check":
        parser.print_help(sys.stderr)
        return EXIT_INPUT
    if args.list_checks:
        sys.stdout.write(list_checks())
        return EXIT_PASS
    if not args.scenario:
        sys.stderr.write("courant check: a scenario is required\n")
        return EXIT_INPUT
    try:
        sc = load_scenario(resolve_scenario(args.scenario))
        run = run_scenario(sc, args.seed)
    except ScenarioError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT
    if args.format == "json":
        sys.stdout.write(run.to_json(args.timings))
    else:
        sys.stdout.write(format_text(run))
    return EXIT_PASS if run.status == "pass" else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

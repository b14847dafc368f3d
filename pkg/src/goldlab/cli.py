"""Command line: run, reproduce, list, check."""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

from .hypotheses import descriptor_from_json
from .scenarios import (
    ScenarioError,
    builtin_names,
    evaluate,
    load_builtin,
    load_file,
    render,
    run_scenario,
    write_artifacts,
)
from .tracefile import TraceFormatError, load_trace

EXIT_OK, EXIT_MISMATCH, EXIT_ERROR = 0, 1, 2


def _execute(sc, out: Optional[str]) -> tuple[str, bool]:
    result = run_scenario(sc)
    text = render(result)
    if out:
        path = write_artifacts(result, out)
        text += f"  artifacts: {path}\n"
    return text, result.ok


def _reproduce_one(name: str, out: Optional[str]) -> tuple[str, bool]:
    return _execute(load_builtin(name), out)


def cmd_run(args) -> int:
    text, ok = _execute(load_file(args.file), args.out)
    sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_reproduce(args) -> int:
    if args.all:
        names = builtin_names()
    elif args.name:
        names = [args.name]
        load_builtin(args.name)  # fail early on unknown names
    else:
        raise ScenarioError("give a scenario name or --all")
    if args.jobs > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_reproduce_one, names, [args.out] * len(names)))
    else:
        outcomes = [_reproduce_one(n, args.out) for n in names]
    for text, _ in outcomes:
        sys.stdout.write(text)
    failed = [n for n, (_, ok) in zip(names, outcomes) if not ok]
    if len(names) > 1:
        print(f"{len(names) - len(failed)}/{len(names)} scenarios met their expectations")
    return EXIT_OK if not failed else EXIT_MISMATCH


def cmd_list(args) -> int:
    for name in builtin_names():
        sc = load_builtin(name)
        print(f"{name:<24} {sc.description}")
    return EXIT_OK


def cmd_check(args) -> int:
    trace = load_trace(args.trace)
    if args.target:
        trace.target = descriptor_from_json(json.loads(args.target))
    if args.horizon is not None:
        trace.hyps = trace.hyps[: args.horizon]
        trace.prefix = trace.prefix.initial(args.horizon)
    ctx = {"horizon": len(trace), "extra": {}, "seed": 0}
    v = evaluate(args.monitor, trace, args.bound, ctx)
    print(v.dumps())
    print(v.describe())
    return EXIT_OK if v.passed else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="goldlab", description="Learning-from-informant scenarios and monitors.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario file")
    r.add_argument("file")
    r.add_argument("--out", default=None, help="directory for trace, verdict and table files")
    r.set_defaults(func=cmd_run)

    rp = sub.add_parser("reproduce", help="run a built-in scenario")
    rp.add_argument("name", nargs="?")
    rp.add_argument("--all", action="store_true")
    rp.add_argument("--jobs", type=int, default=1, help="scenarios to run in parallel")
    rp.add_argument("--out", default=None)
    rp.set_defaults(func=cmd_reproduce)

    ls = sub.add_parser("list", help="list built-in scenarios")
    ls.set_defaults(func=cmd_list)

    c = sub.add_parser("check", help="run one monitor over a trace file")
    c.add_argument("trace")
    c.add_argument("--monitor", required=True, help="restriction name, Lim(a,b), Total or Agree")
    c.add_argument("--target", default=None, help="descriptor JSON; defaults to the trace's own target")
    c.add_argument("--horizon", type=int, default=None)
    c.add_argument("--bound", type=int, default=200)
    c.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, TraceFormatError, FileNotFoundError, KeyError, ValueError) as e:
        print(f"goldlab: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""``isl`` command line: compile, check, paths, gen, dot.

Exit status: 0 success or accept, 1 reject, 2 spec error, 3 step budget
exceeded, 4 no feasible path within the enumeration bounds.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from pathlib import Path

from . import __version__
from .compiler import CompileError, compile_hl
from .core import HlAutomaton, MachineConfig, validate
from .dot import to_dot
from .frontend import ParseError, bundled_names, bundled_text, load, serialize
from .interpreter import Outcome, interpret_ll
from .pathgen import EnumBounds, PathReport, Truncated, enumerate_paths
from .solver import Exhausted, Infeasible, export_smtlib, synthesize

EXIT_OK, EXIT_REJECT, EXIT_SPEC, EXIT_BUDGET, EXIT_NO_PATHS = 0, 1, 2, 3, 4

_DEFAULTS = {
    "max_reg": MachineConfig.max_reg,
    "steps": MachineConfig.step_limit,
    "max_path_len": EnumBounds.max_path_len,
    "max_edge_visits": EnumBounds.max_edge_visits,
    "max_paths": EnumBounds.max_paths,
    "seed": 0,
    "budget": 100_000,
}


class SpecError(Exception):
    """Raised with ready-to-print diagnostic lines."""

    def __init__(self, lines):
        super().__init__("\n".join(lines))
        self.lines = lines


def _defaults() -> dict:
    out = dict(_DEFAULTS)
    path = os.environ.get("ISL_CONFIG")
    if path:
        with open(path, encoding="utf-8") as fh:
            extra = json.load(fh)
        unknown = set(extra) - set(out)
        if unknown:
            raise SystemExit(f"isl: unknown keys in {path}: {', '.join(sorted(unknown))}")
        out.update(extra)
    return out


def _read_spec(ref: str) -> str:
    p = Path(ref)
    if p.exists():
        return p.read_text(encoding="utf-8", errors="surrogateescape")
    if ref in bundled_names():
        return bundled_text(ref)
    raise SpecError([f"{ref}: no such file or bundled spec"])


def _load(args, ref: str):
    text = _read_spec(ref)
    cfg = MachineConfig(max_reg=args.max_reg, step_limit=args.steps)
    try:
        return load(text, cfg)
    except ParseError as exc:
        raise SpecError([f"{ref}:{exc}"]) from None


def _compiled(args, ref: str):
    """Low-level automaton for ``ref`` plus the high-level one it came from (or None)."""
    automaton = _load(args, ref)
    if not isinstance(automaton, HlAutomaton):
        problems = validate(automaton)
        if problems:
            raise SpecError([f"{ref}: {d}" for d in problems])
        return automaton, None
    try:
        return compile_hl(automaton), automaton
    except CompileError as exc:
        lines = [f"{ref}: {d}" for d in exc.diagnostics] or [f"{ref}: {exc}"]
        raise SpecError(lines) from None


def _bounds(args) -> EnumBounds:
    return EnumBounds(args.max_path_len, args.max_paths, args.max_edge_visits,
                      prune=not args.no_prune)


def cmd_compile(args) -> int:
    ll, hl = _compiled(args, args.spec)
    if args.output:
        Path(args.output).write_text(serialize(ll), encoding="utf-8")
    if hl is None:
        print(f"LL={ll.state_count}")
    else:
        print(f"HL={hl.state_count} LL={ll.state_count}")
    return EXIT_OK


def cmd_check(args) -> int:
    ll, _ = _compiled(args, args.spec)
    data = sys.stdin.buffer.read() if args.input == "-" else Path(args.input).read_bytes()
    verdict = interpret_ll(ll, data, step_limit=args.steps)
    if verdict.outcome is Outcome.ACCEPT:
        if args.trace:
            for i in verdict.trace:
                t = ll.transitions[i]
                print(f"{i}\t{t.src} -> {t.dst}\t{t.label()}")
        return EXIT_OK
    if verdict.outcome is Outcome.BUDGET_EXCEEDED:
        print(f"isl: step budget of {args.steps} exceeded", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_REJECT


def cmd_paths(args) -> int:
    ll, _ = _compiled(args, args.spec)
    smt_dir = Path(args.smt) if args.smt else None
    if smt_dir:
        smt_dir.mkdir(parents=True, exist_ok=True)
    out = sys.stdout
    for item in enumerate_paths(ll, _bounds(args)):
        out.write(json.dumps(item.to_json(), sort_keys=True) + "\n")
        if smt_dir and isinstance(item, PathReport):
            (smt_dir / f"path-{item.index}.smt2").write_text(
                export_smtlib(item.constraints), encoding="utf-8")
    return EXIT_OK


def cmd_gen(args) -> int:
    started = time.perf_counter()
    ll, _ = _compiled(args, args.spec)
    rng = random.Random(args.seed) if args.random else None
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    entries = []
    skipped = {"infeasible": 0, "exhausted": 0}
    truncated = False
    for item in enumerate_paths(ll, _bounds(args)):
        if isinstance(item, Truncated):
            truncated = True
            break
        try:
            witness = synthesize(item.constraints, budget=args.budget, rng=rng)
        except Infeasible:
            skipped["infeasible"] += 1
            continue
        except Exhausted:
            skipped["exhausted"] += 1
            continue
        name = f"path-{len(entries)}.bin"
        (outdir / name).write_bytes(witness.input)
        entries.append({"file": name, "path_index": item.index,
                        "transitions": list(item.transitions)})
        if len(entries) >= args.count:
            break

    manifest = {
        "tool": "isl",
        "version": __version__,
        "command": "gen",
        "spec": args.spec,
        "bounds": {"max_reg": args.max_reg, "max_path_len": args.max_path_len,
                   "max_edge_visits": args.max_edge_visits, "max_paths": args.max_paths,
                   "prune": not args.no_prune, "budget": args.budget},
        "count": args.count,
        "seed": args.seed,
        "random": args.random,
        "paths_truncated": truncated,
        "skipped": skipped,
        "files": entries,
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n",
                                          encoding="utf-8")
    run = {"argv": args.argv, "seconds": round(time.perf_counter() - started, 6),
           "witnesses": len(entries)}
    (outdir / "run.json").write_text(json.dumps(run, sort_keys=True, indent=2) + "\n",
                                     encoding="utf-8")
    if not entries:
        print("isl: no feasible path within the enumeration bounds", file=sys.stderr)
        return EXIT_NO_PATHS
    return EXIT_OK


def cmd_dot(args) -> int:
    automaton = _compiled(args, args.spec)[0] if args.ll else _load(args, args.spec)
    sys.stdout.write(to_dot(automaton, Path(args.spec).stem))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    d = _defaults()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-reg", type=int, default=d["max_reg"],
                        help="register count for tag-format specs (default %(default)s)")
    common.add_argument("--steps", type=int, default=d["steps"],
                        help="interpreter step budget (default %(default)s)")
    enum = argparse.ArgumentParser(add_help=False)
    enum.add_argument("--max-path-len", type=int, default=d["max_path_len"])
    enum.add_argument("--max-edge-visits", type=int, default=d["max_edge_visits"])
    enum.add_argument("--max-paths", type=int, default=d["max_paths"])
    enum.add_argument("--no-prune", action="store_true",
                      help="keep prefixes whose constraints are already infeasible")

    parser = argparse.ArgumentParser(prog="isl", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"isl {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", parents=[common], help="compile a spec to low-level JSON")
    p.add_argument("spec", help="spec file or bundled spec name")
    p.add_argument("-o", "--output", help="write the low-level automaton here")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("check", parents=[common], help="run a spec on an input file")
    p.add_argument("spec")
    p.add_argument("input", help="input file, or - for standard input")
    p.add_argument("--trace", action="store_true", help="print the accepting transitions")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("paths", parents=[common, enum], help="enumerate path constraints")
    p.add_argument("spec")
    p.add_argument("--smt", metavar="DIR", help="also write one SMT-LIB file per path")
    p.set_defaults(func=cmd_paths)

    p = sub.add_parser("gen", parents=[common, enum], help="write a witness corpus")
    p.add_argument("spec")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=d["seed"])
    p.add_argument("--outdir", default="corpus")
    p.add_argument("--random", action="store_true",
                   help="sample unconstrained bytes from the seeded generator")
    p.add_argument("--budget", type=int, default=d["budget"], help="solver attempt budget")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("dot", parents=[common], help="render a spec as GraphViz")
    p.add_argument("spec")
    p.add_argument("--ll", action="store_true", help="render the compiled automaton")
    p.set_defaults(func=cmd_dot)
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    args.argv = argv
    try:
        return args.func(args)
    except SpecError as exc:
        for line in exc.lines:
            print(line, file=sys.stderr)
        return EXIT_SPEC
    except ValueError as exc:
        print(f"isl: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())

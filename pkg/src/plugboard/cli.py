"""``plugboard`` command-line front end.

Exit status: 0 on success, 1 for user errors (parse, type, validation,
elaboration, bad inputs, I/O), 2 when an internal invariant is broken.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .bundled import PROGRAM_DIR, run_corpus
from .errors import CalculusError, ProgramError
from .evaluation import Closure, elaborate, run_fast, run_tokens
from .functionals import as_construction
from .netgraph import deserialize, serialize, to_dot, validate
from .program import Definition, Program, parse_program, parse_values
from .selftest import MUTATIONS, run_selftest
from .spikecodec import BurstConfig

EXIT_OK = 0
EXIT_USER = 1
EXIT_INTERNAL = 2


class InvariantError(Exception):
    """The engine produced something that breaks its own guarantees."""


def load(path: str) -> Program:
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".pbg"):
        c = deserialize(text)
        return Program({"main": Definition("main", c, 1)})
    return parse_program(text)


def _write(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _format_value(v) -> str:
    if isinstance(v, tuple):
        return ";".join(_format_value(x) for x in v)
    if isinstance(v, Closure):
        raise CalculusError(f"output is a function {v!r}; only numerals can be printed")
    return str(v)


def cmd_check(args) -> int:
    prog = load(args.file)
    for d in prog.definitions.values():
        problems = validate(as_construction(d.value))
        if problems:
            raise InvariantError(f"definition {d.name} built an invalid graph: {problems[0]}")
    print("\n".join(prog.report()))
    return EXIT_OK


def cmd_eval(args) -> int:
    main = load(args.file).get(args.define)
    inputs = parse_values(args.input)
    if args.semantics == "fast":
        if args.trace:
            raise CalculusError("--trace needs --semantics tokens")
        outputs = run_fast(main, inputs)
        print(";".join(_format_value(v) for v in outputs))
        return EXIT_OK
    cfg = BurstConfig(args.isi_ms, args.gap_ms)
    circuit = elaborate(main)
    outputs, trace = run_tokens(circuit, inputs, cfg)
    if args.trace:
        _write(trace.to_text(), args.trace)
    print(";".join(map(str, outputs)))
    return EXIT_OK


def cmd_elaborate(args) -> int:
    circuit = elaborate(load(args.file).get(args.define))
    problems = validate(circuit)
    if problems:
        raise InvariantError(f"elaboration produced an invalid circuit: {problems[0]}")
    if args.out:
        _write(serialize(circuit), args.out)
    print(f"boards={len(circuit.boards)} links={len(circuit.links)}")
    return EXIT_OK


def cmd_dot(args) -> int:
    c = load(args.file).get(args.define)
    if args.elaborated:
        c = elaborate(c)
    _write(to_dot(c), args.out)
    return EXIT_OK


def cmd_show(args) -> int:
    _write(serialize(load(args.file).get(args.define)), args.out)
    return EXIT_OK


def cmd_selftest(args) -> int:
    results = run_selftest(args.mutate)
    failed = sum(1 for r in results if not r.passed)
    print(f"{len(results) - failed} passed, {failed} failed")
    return EXIT_OK if not failed else EXIT_USER


def cmd_corpus(args) -> int:
    results = run_corpus(args.dir, write_goldens=args.write_goldens)
    for r in results:
        print(r.line())
    failed = sum(1 for r in results if not r.passed)
    print(f"corpus: {len(results) - failed}/{len(results)} PASS")
    return EXIT_OK if not failed else EXIT_USER


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plugboard", description="Typed boards, links and functionals.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def with_file(name, help_text):
        q = sub.add_parser(name, help=help_text)
        q.add_argument("file", help=".pbc program or .pbg graph")
        if name != "check":
            q.add_argument("--define", default="main", help="definition to use (default: main)")
        return q

    with_file("check", "print the interface type of every definition").set_defaults(func=cmd_check)

    q = with_file("eval", "evaluate a definition")
    q.add_argument("--input", default="", help='numerals separated by ";", e.g. "3;4"')
    q.add_argument("--semantics", choices=["fast", "tokens"], default="fast")
    q.add_argument("--trace", metavar="PATH", help="write the firing trace (tokens only; - for stdout)")
    q.add_argument("--isi-ms", default="2", help="spacing of spikes inside a burst")
    q.add_argument("--gap-ms", default="20", help="minimum silence between bursts")
    q.set_defaults(func=cmd_eval)

    q = with_file("elaborate", "unfold into a first-order circuit")
    q.add_argument("--out", metavar="PATH", help="write the serialized circuit")
    q.set_defaults(func=cmd_elaborate)

    q = with_file("dot", "export Graphviz DOT")
    q.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    q.add_argument("--elaborated", action="store_true", help="export the elaborated circuit")
    q.set_defaults(func=cmd_dot)

    q = with_file("show", "print the serialized graph")
    q.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    q.set_defaults(func=cmd_show)

    q = sub.add_parser("selftest", help="run the oracle differential suites")
    q.add_argument("--mutate", choices=sorted(MUTATIONS), help=argparse.SUPPRESS)
    q.set_defaults(func=cmd_selftest)

    q = sub.add_parser("corpus", help="run the bundled example programs")
    q.add_argument("--dir", type=Path, default=PROGRAM_DIR, help=argparse.SUPPRESS)
    q.add_argument("--write-goldens", action="store_true", help=argparse.SUPPRESS)
    q.set_defaults(func=cmd_corpus)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CalculusError, OSError, ValueError) as e:
        label = "" if isinstance(e, ProgramError) else f"{type(e).__name__}: "
        print(f"error: {label}{e}", file=sys.stderr)
        return EXIT_USER
    except Exception as e:
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

"""Command line front end: ``mwcalc eval|run|laws|version``."""
from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .errors import MWCalcError, ParseError
from .expr import Session, parse, parse_all, result_line


def _seed(args_seed):
    env = os.environ.get("MWCALC_SEED")
    if env is not None and env.strip():
        return int(env)
    return args_seed


def _error_line(exc, line):
    kind = type(exc).__name__
    if isinstance(exc, ParseError):
        return f"error: line {getattr(exc, 'form_line', exc.line)}: {kind}: {exc}"
    return f"error: line {line}: {kind}: {exc}"


def cmd_eval(text, seed, out, err):
    session = Session(seed=seed)
    try:
        value = session.eval(parse(text))
    except (MWCalcError, ArithmeticError, ValueError, TypeError) as exc:
        print(_error_line(exc, getattr(exc, "line", 1)), file=err)
        return 1
    print(result_line(value), file=out)
    return 0


def cmd_run(path, seed, out, err):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        print(f"error: IoError: {exc}", file=err)
        return 1
    try:
        forms = parse_all(data)
    except ParseError as exc:
        print(_error_line(exc, exc.line), file=err)
        return 1
    session = Session(seed=seed)
    for node in forms:
        try:
            value = session.eval(node)
        except (MWCalcError, ArithmeticError, ValueError, TypeError) as exc:
            out.flush()
            print(_error_line(exc, node.line), file=err)
            return 1
        print(result_line(value), file=out)
    return 0


def cmd_laws(suite, seed, cases, out, err):
    from .laws import run_laws

    try:
        report = run_laws(suite, seed=seed, cases=cases)
    except MWCalcError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=err)
        return 2
    print(report.text(), file=out)
    return 0 if report.passed else 1


def build_parser():
    ap = argparse.ArgumentParser(prog="mwcalc", description="Exact Milnor-Witt calculator")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("eval", help="evaluate one expression")
    p.add_argument("expr")
    p.add_argument("--seed", type=int, default=0)
    p = sub.add_parser("run", help="evaluate every form in a file")
    p.add_argument("file")
    p.add_argument("--seed", type=int, default=0)
    p = sub.add_parser("laws", help="run a randomized law suite")
    p.add_argument("suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=300)
    sub.add_parser("version", help="print the version")
    return ap


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    if args.command == "version":
        print(f"mwcalc {__version__}", file=out)
        return 0
    seed = _seed(args.seed)
    if args.command == "eval":
        return cmd_eval(args.expr, seed, out, err)
    if args.command == "run":
        return cmd_run(args.file, seed, out, err)
    return cmd_laws(args.suite, seed, args.cases, out, err)


if __name__ == "__main__":
    sys.exit(main())

"""Command line entry point: motint run FILE, motint repl."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .dsl.evaluator import Evaluator, ScriptError
from .dsl.syntax import ParseError, parse
from .oracle import DepthError, OracleConfig
from .summation import NotIntegrable

EXIT_OK, EXIT_CHECK, EXIT_PARSE, EXIT_INTEGRABILITY = 0, 1, 2, 3


def parse_oracle(items: list[str]) -> OracleConfig:
    """Parse ['q=2,3', 'p=3,5', 'depth=6'] into a config."""
    cfg = OracleConfig()
    for item in items:
        key, _, val = item.partition("=")
        vals = [v for v in val.split(",") if v]
        if key == "q":
            cfg = OracleConfig(tuple(Fraction(v) for v in vals), cfg.primes, cfg.box, cfg.depth, cfg.rtol)
        elif key == "p":
            cfg = OracleConfig(cfg.qs, tuple(int(v) for v in vals), cfg.box, cfg.depth, cfg.rtol)
        elif key == "depth":
            cfg.depth = int(val)
        else:
            raise ValueError(f"unknown oracle setting {key!r}")
    return cfg


def run_text(text: str, oracle: OracleConfig | None = None, seed: int = 0, out=print, name: str = "<script>"):
    """Run a script; returns (exit code, evaluator or None)."""
    try:
        script = parse(text)
    except ParseError as e:
        out(f"{name}: parse error: {e}")
        return EXIT_PARSE, None
    ev = Evaluator(oracle, seed, out)
    try:
        ev.run(script)
    except ScriptError as e:
        out(f"{name}: error: {e}")
        return EXIT_PARSE, ev
    except NotIntegrable as e:
        out(f"{name}: {e}")
        if e.cell is not None:
            out(f"  cell: {e.cell}")
        if e.direction is not None:
            d = e.direction
            out("  direction: " + (", ".join(f"{k}={v}" for k, v in d.items()) if isinstance(d, dict) else str(d)))
        if e.term is not None:
            out(f"  term: {e.term}")
        return EXIT_INTEGRABILITY, ev
    except DepthError as e:
        out(f"{name}: oracle error: {e}")
        return EXIT_CHECK, ev
    return (EXIT_CHECK if ev.failed() else EXIT_OK), ev


def cmd_run(args) -> int:
    with open(args.file, encoding="utf-8") as fh:
        text = fh.read()
    oracle = parse_oracle(args.oracle) if args.oracle is not None else None
    code, ev = run_text(text, oracle, args.seed, name=args.file)
    if args.out and ev is not None:
        blob = ev.to_json()
        blob["script"] = args.file
        blob["exit"] = code
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(blob, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return code


def cmd_repl(args) -> int:
    ev = Evaluator(parse_oracle(args.oracle) if args.oracle is not None else None, args.seed)
    buf = ""
    print("motint repl; statements end with ';', ctrl-d to quit")
    while True:
        try:
            line = input("... " if buf else ">>> ")
        except EOFError:
            print()
            return EXIT_OK
        buf += line + "\n"
        if ";" not in line:
            continue
        try:
            ev.run(parse(buf))
        except ParseError as e:
            print(f"parse error: {e}")
        except (ScriptError, NotIntegrable, DepthError) as e:
            print(f"error: {e}")
        buf = ""


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="motint", description="motivic integration scripts")
    sub = ap.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run a script")
    r.add_argument("file")
    r.add_argument("--out", help="write results as JSON")
    r.add_argument("--oracle", nargs="*", metavar="KEY=VALUES", help="enable oracle checks, e.g. q=2,3 p=3,5 depth=6")
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(func=cmd_run)
    i = sub.add_parser("repl", help="interactive session")
    i.add_argument("--oracle", nargs="*", metavar="KEY=VALUES")
    i.add_argument("--seed", type=int, default=0)
    i.set_defaults(func=cmd_repl)
    args = ap.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

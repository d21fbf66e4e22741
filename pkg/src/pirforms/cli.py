"""Command line: ``pirforms analyze | verify | example``.

Exit codes: 0 success, 1 property violation, 2 bad input or parameters,
3 enumeration budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .modules import BudgetExceeded
from .oracle import SUITES, run_suite
from .reports import EXAMPLES, InstanceError, analyze, parse_instance, render_suite, render_text
from .ring import is_prime

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


def _shapes(text: str):
    try:
        return [tuple(int(x) for x in part.split(",")) for part in text.split(";") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad shape list {text!r}; use e.g. '2,1;3'") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pirforms", description="Anisotropy of bilinear forms over finite PIRs")
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="analyze one instance document")
    a.add_argument("path", help="JSON instance file, or - for standard input")
    a.add_argument("--json", action="store_true", help="emit the machine-readable report")
    a.add_argument("--no-oracle", action="store_true", help="skip the brute-force radical root and conditions")
    a.add_argument("--budget", type=int, default=None, help="max module size for enumeration")

    v = sub.add_parser("verify", help="run a theorem suite")
    v.add_argument("--suite", required=True, choices=SUITES)
    v.add_argument("--p", type=int, default=3)
    v.add_argument("--max-len", type=int, default=3)
    v.add_argument("--shapes", type=_shapes, default=None, help="factor-length tuples, e.g. '2,1;3'")
    v.add_argument("--family", choices=["Zp", "Fpt"], default="Zp")
    v.add_argument("--ring-length", type=int, default=None)
    v.add_argument("--samples", type=int, default=64)
    v.add_argument("--exhaustive-limit", type=int, default=4096)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--budget", type=int, default=None)
    v.add_argument("--json", action="store_true")

    e = sub.add_parser("example", help="print a bundled instance document")
    e.add_argument("name", choices=sorted(EXAMPLES))
    return ap


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def cmd_analyze(args) -> int:
    try:
        inst = parse_instance(_read(args.path))
    except (OSError, UnicodeDecodeError, InstanceError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    try:
        report = analyze(inst, oracle=not args.no_oracle, budget=args.budget)
    except BudgetExceeded as e:
        print(f"error: {e}; rerun with --no-oracle or a larger --budget", file=sys.stderr)
        return EXIT_BUDGET
    print(json.dumps(report, indent=2) if args.json else render_text(report))
    return EXIT_OK


def cmd_verify(args) -> int:
    if not is_prime(args.p):
        print(f"error: --p {args.p} is not prime", file=sys.stderr)
        return EXIT_INPUT
    if args.max_len < 1 or args.samples < 0 or (args.ring_length is not None and args.ring_length < 1):
        print("error: --max-len and --ring-length must be positive, --samples non-negative", file=sys.stderr)
        return EXIT_INPUT
    if args.shapes is not None and any(not s or min(s) < 1 for s in args.shapes):
        print("error: factor lengths must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        res = run_suite(args.suite, p=args.p, max_length=args.max_len, shapes=args.shapes, samples=args.samples,
                        seed=args.seed, family=args.family, exhaustive_limit=args.exhaustive_limit,
                        ring_length=args.ring_length, budget=args.budget)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    print(json.dumps(res.to_dict(), indent=2) if args.json else render_suite(res))
    return EXIT_OK if res.passed else EXIT_VIOLATION


def cmd_example(args) -> int:
    print(json.dumps(EXAMPLES[args.name], indent=2))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return {"analyze": cmd_analyze, "verify": cmd_verify, "example": cmd_example}[args.command](args)


if __name__ == "__main__":
    sys.exit(main())

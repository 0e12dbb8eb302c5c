"""Command-line front end.

Exit codes: 0 separable / within epsilon, 2 input error, 3 not separable,
4 epsilon not met.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import approx, exact
from .gates import NAMED, RANDOM, make_gate
from .generator import generator_of
from .io import (
    approx_to_json,
    digest,
    dumps_gate,
    loads_gate,
    separation_to_json,
)
from .linalg import GateSplitError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOT_SEPARABLE = 3
EXIT_EPSILON = 4

NORMS = {"op": "operator", "fro": "frobenius", "trace": "trace"}


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _emit(report: dict, started: float) -> None:
    report["wall_time_ms"] = round((time.perf_counter() - started) * 1e3, 3)
    sys.stdout.write(json.dumps(report, indent=2) + "\n")


def _load(args):
    u = loads_gate(_read(args.input), validate=not args.no_validate)
    return u, {"path": args.input, "dims": list(u.space.dims), "digest": digest(u)}


def cmd_check(args, argv) -> int:
    started = time.perf_counter()
    u, meta = _load(args)
    res = exact.separate_unitary(u, tol=args.tol)
    result = {"oracle": separation_to_json(res)}
    tolerances = {"tol": args.tol}
    if u.space.is_qubits:
        site = exact.qubit_structure_check(generator_of(u), tol=args.block_tol)
        result["structure_check"] = {
            "method": exact.Method.STRUCTURE_CHECK.value,
            "verdict": (exact.Verdict.SEPARABLE if site is not None else exact.Verdict.INCONCLUSIVE).value,
            "site": site,
        }
        tolerances["block_tol"] = args.block_tol
    _emit({"command": argv, "input": meta, "result": result, "tolerances": tolerances}, started)
    return EXIT_OK if res.separable else EXIT_NOT_SEPARABLE


def cmd_separate(args, argv) -> int:
    started = time.perf_counter()
    u, meta = _load(args)
    res = exact.separate_unitary(u, tol=args.tol)
    report = {
        "command": argv,
        "input": meta,
        "result": separation_to_json(res),
        "tolerances": {"tol": args.tol, "residual_max": exact.RESIDUAL_MAX},
    }
    _emit(report, started)
    return EXIT_OK if res.separable else EXIT_NOT_SEPARABLE


def cmd_approx(args, argv) -> int:
    started = time.perf_counter()
    if args.epsilon is not None and not args.epsilon > 0:
        raise GateSplitError(f"--epsilon must be positive, got {args.epsilon}")
    if args.t == 0:
        raise GateSplitError("--t must be nonzero")
    u, meta = _load(args)
    res = approx.approx_separate(u, t=args.t, epsilon=args.epsilon, kind=NORMS[args.norm])
    result = approx_to_json(res)
    ok = args.epsilon is None or res.measured < args.epsilon
    if args.epsilon is not None:
        result["within_epsilon"] = ok
    report = {
        "command": argv,
        "input": meta,
        "result": result,
        "tolerances": {"epsilon": args.epsilon, "t": args.t, "norm": args.norm},
    }
    _emit(report, started)
    return EXIT_OK if ok else EXIT_EPSILON


def cmd_gates(args, argv) -> int:
    rest = args.params
    if args.name in RANDOM:
        if len(rest) != 2:
            raise GateSplitError(f"usage: gates {args.name} N SEED")
        try:
            n, seed = int(rest[0]), int(rest[1])
        except ValueError:
            raise GateSplitError("N and SEED must be integers") from None
        m, space = make_gate(args.name, n, seed)
    else:
        if rest:
            raise GateSplitError(f"{args.name} takes no parameters")
        m, space = make_gate(args.name)
    sys.stdout.write(dumps_gate(m, space.dims) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gatesplit",
        description="Separate multipartite unitary gates into tensor products of local gates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def gate_input(p):
        p.add_argument("input", help="gate file (JSON), or - for stdin")
        p.add_argument("--no-validate", action="store_true", help="skip the unitarity check")

    p = sub.add_parser("check", help="decide separability")
    gate_input(p)
    p.add_argument("--tol", type=float, default=exact.SCHMIDT_TOL,
                   help="relative Schmidt-coefficient cutoff (default %(default)g)")
    p.add_argument("--block-tol", type=float, default=exact.BLOCK_TOL,
                   help="relative block tolerance of the qubit structure check (default %(default)g)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("separate", help="extract local factors and global phase")
    gate_input(p)
    p.add_argument("--tol", type=float, default=exact.SCHMIDT_TOL,
                   help="relative Schmidt-coefficient cutoff (default %(default)g)")
    p.set_defaults(func=cmd_separate)

    p = sub.add_parser("approx", help="approximate separation with distance bounds")
    gate_input(p)
    p.add_argument("--epsilon", type=float, default=None, help="target operator-norm distance")
    p.add_argument("--t", type=float, default=1.0, help="time parameter in U = exp(itH) (default 1)")
    p.add_argument("--norm", choices=sorted(NORMS), default="op", help="norm for the bound")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("gates", help="print a corpus gate as a gate file")
    p.add_argument("name", choices=[*NAMED, *RANDOM])
    p.add_argument("params", nargs="*", help="N SEED for random gates")
    p.set_defaults(func=cmd_gates)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args, argv)
    except (GateSplitError, OSError, ValueError) as e:
        print(f"gatesplit: error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

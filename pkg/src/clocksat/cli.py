"""Command-line front end.

Thin client over the service handlers: each subcommand reads JSON files,
builds the corresponding request model, and prints the response as JSON
(DOT for export-dot).  Exit code 0 means accept/success, 1 means reject,
2 means a usage or input problem.  All randomness flows from --seed, so
identical invocations print identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys

from .model import MalformedJson
from .oracle import DimensionBudgetExceeded, NoConvergence
from . import service


def _read_json(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise service.UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise MalformedJson(f"{path}: top level must be a JSON object")
    return obj


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clocksat",
        description="Decide, compile, and inspect clock-constraint instances.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decide", help="run the decision procedure")
    p.add_argument("--instance", required=True, metavar="FILE")
    p.add_argument("--witness", metavar="BITS", help="witness bits, ascending qudit id")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=32)

    p = sub.add_parser("compile", help="reduce a circuit to an instance")
    p.add_argument("--circuit", required=True, metavar="FILE")
    p.add_argument("--target", required=True, metavar="VARIANT")

    p = sub.add_parser("oracle", help="spectral report via exact numerics")
    p.add_argument("--instance", required=True, metavar="FILE")
    p.add_argument("--budget", type=int, metavar="N", help="iterative-path dimension cap")

    p = sub.add_parser("combine", help="direct product or sum of two instances")
    p.add_argument("--op", required=True, choices=["product", "sum"])
    p.add_argument("--left", required=True, metavar="FILE")
    p.add_argument("--right", required=True, metavar="FILE")

    p = sub.add_parser("qubitize", help="map a qudit instance onto qubits")
    p.add_argument("--instance", required=True, metavar="FILE")
    p.add_argument("--padding", default="p1", choices=["p1", "p2"])

    p = sub.add_parser("export-dot", help="Graphviz view of an instance")
    p.add_argument("--instance", required=True, metavar="FILE")
    return parser


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "decide":
        resp = service.handle_decide(
            service.DecideRequest(
                instance=_read_json(args.instance),
                witness=args.witness,
                seed=args.seed,
                reps=args.reps,
            )
        )
        print(json.dumps(resp.model_dump(), indent=2, default=list))
        return 0 if resp.accept else 1
    if args.command == "compile":
        resp = service.handle_compile(
            service.CompileRequest(
                circuit=_read_json(args.circuit), target=args.target
            )
        )
        print(json.dumps(resp.instance, indent=2))
        return 0
    if args.command == "oracle":
        resp = service.handle_oracle(
            service.OracleRequest(
                instance=_read_json(args.instance), budget=args.budget
            )
        )
        print(json.dumps(resp.model_dump(), indent=2))
        return 0
    if args.command == "combine":
        resp = service.handle_combine(
            service.CombineRequest(
                op=args.op,
                left=_read_json(args.left),
                right=_read_json(args.right),
            )
        )
        print(json.dumps(resp.model_dump(), indent=2))
        return 0
    if args.command == "qubitize":
        resp = service.handle_qubitize(
            service.QubitizeRequest(
                instance=_read_json(args.instance), padding=args.padding
            )
        )
        print(json.dumps(resp.instance, indent=2))
        return 0
    if args.command == "export-dot":
        resp = service.handle_export_dot(
            service.ExportDotRequest(instance=_read_json(args.instance))
        )
        print(resp.dot)
        return 0
    raise AssertionError(f"unhandled command {args.command}")


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (DimensionBudgetExceeded, NoConvergence) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # MalformedJson, UsageError, GateSetMismatch, and kin
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

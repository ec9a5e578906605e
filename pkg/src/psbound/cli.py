"""Command line entry point: ``psbound verify|chernoff|bounds|scan|monotone|os-check``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .campaign import COMMANDS, EXIT_CONFIG, CampaignSpec, emit_curve, render, run_campaign
from .errors import PsboundError
from .functions import parse_function_list
from .sampling import STRATEGIES

log = logging.getLogger("psbound")


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _strategies(text):
    return list(STRATEGIES) if text == "all" else [s.strip() for s in text.split(",") if s.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--functions", help="comma-separated function specs, e.g. power:0.5,lambert_w")
    common.add_argument("--function", dest="function", help="a single function spec")
    common.add_argument("--dims", type=_int_list, default=[2, 3, 4])
    common.add_argument("--trials", type=int, default=100)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--alpha", type=_float_list, default=[0.0, 0.25, 0.5, 0.75, 1.0])
    common.add_argument("--strategy", type=_strategies, default=list(STRATEGIES),
                        help="anticommutator pair strategies: commuting, perturbative, rejection or all")
    common.add_argument("--checks", default="ps",
                        help="verify only: comma list of ps, three-matrix, lemma, joint-convexity")
    common.add_argument("--order", type=int, help="monotone only: Loewner order to test")
    common.add_argument("--state-a", help="matrix JSON file")
    common.add_argument("--state-b", help="matrix JSON file")
    common.add_argument("--tol", type=float, help="override the Loewner-test tolerance")
    common.add_argument("--out", help="report path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--emit-curve", help="also write (x, f(x), g(x)) CSV for the functions")
    common.add_argument("--workers", type=int, help="parallel workers (default: $PSBOUND_WORKERS or 1)")
    common.add_argument("--no-timestamp", action="store_true", help="omit generated_at from the report")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="psbound", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "verify": "trace inequality campaign on random positive pairs",
        "chernoff": "quantum Chernoff bound and trace-distance sandwich",
        "bounds": "function-family bounds and the trace-distance lower bound",
        "scan": "convexity of s -> tr(A^s B^(1-s))",
        "monotone": "Loewner-matrix and randomized monotonicity tests",
        "os-check": "operator inequalities for means and perspectives",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def spec_from_args(args) -> CampaignSpec:
    functions = []
    if args.functions:
        functions += [f.to_spec() for f in parse_function_list(args.functions)]
    if args.function:
        functions += [f.to_spec() for f in parse_function_list(args.function)]
    return CampaignSpec(
        command=args.command,
        functions=functions,
        dims=args.dims,
        trials=args.trials,
        seed=args.seed,
        tolerance=args.tol,
        alphas=args.alpha,
        strategies=args.strategy,
        checks=[c.strip() for c in args.checks.split(",") if c.strip()],
        state_a=args.state_a,
        state_b=args.state_b,
        order=args.order,
        out=args.out,
        format=args.format,
        emit_curve=args.emit_curve,
        workers=args.workers,
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = spec_from_args(args)
        code, report = run_campaign(spec, timestamp=not args.no_timestamp)
        text = render(report, spec.format)
        if spec.out:
            with open(spec.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        if spec.emit_curve:
            emit_curve(spec.functions or report["provenance"]["functions"], spec.emit_curve)
    except (PsboundError, OSError, json.JSONDecodeError) as exc:
        print(f"psbound: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    summary = report["summary"]
    print(f"psbound {spec.command}: {summary['total']} checks, statuses {summary['statuses']}",
          file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: simulate sweeps, exact means, threshold reports.

Output formats are part of the contract: `simulate` and `exact` emit CSV
with fixed headers and %.12g floats (byte-stable for identical inputs,
whatever --jobs says), `threshold` emits JSON.  Exit codes: 0 success, 1 for
runs degraded by the step cap or per-point failures, 2 for usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional, Sequence

from . import analysis
from .montecarlo import (
    ENV_JOBS,
    AllTrialsCappedError,
    ExperimentSpec,
    GraphSpec,
    sweep,
)
from .protocol import DEFAULT_STEP_CAP, ModelParams

SIMULATE_HEADER = (
    "graph_kind,n,degree_or_pedge,alpha,p,trials,mean_T,ci_low,ci_high,"
    "capped,master_seed,normalized_T"
)
EXACT_HEADER = "n,alpha,p,T_exact,log10_T,lower_bound"


def _fmt(x) -> str:
    """Floats at 12 significant digits; ints verbatim."""
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".12g")


def _parse_n_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty system-size list")
    if any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"system sizes must be positive: {text!r}")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise argparse.ArgumentTypeError(f"system sizes must be strictly increasing: {text!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twochoices",
        description="Biased two-choices opinion dynamics: simulation and exact analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Monte Carlo sweep over system sizes")
    sim.add_argument("--graph", required=True, choices=("complete", "regular", "er"))
    sim.add_argument("--n-list", required=True, type=_parse_n_list,
                     help="comma-separated, strictly increasing system sizes")
    sim.add_argument("--alpha", required=True, type=float, help="bias toward opinion 1")
    sim.add_argument("--p", required=True, type=float, help="initial superior fraction")
    sim.add_argument("--trials", type=int, default=500)
    sim.add_argument("--seed", type=int, default=0, help="master seed")
    sim.add_argument("--d", type=int, help="fixed degree (regular graphs)")
    sim.add_argument("--d-rule", choices=("ceil-log",),
                     help="degree = ceil(log n) (regular graphs)")
    sim.add_argument("--pedge", type=float, help="fixed edge probability (er graphs)")
    sim.add_argument("--pedge-rule", choices=("conn-threshold",),
                     help="edge probability = log(n)/n (er graphs)")
    sim.add_argument("--log-base", choices=("e", "2", "10"), default="e",
                     help="log base used by --d-rule / --pedge-rule")
    sim.add_argument("--step-cap", type=int, default=DEFAULT_STEP_CAP)
    sim.add_argument("--jobs", type=int, default=None,
                     help=f"worker threads (default: ${ENV_JOBS} or 1)")
    sim.add_argument("--out", help="write CSV here instead of stdout")

    exact = sub.add_parser("exact", help="exact complete-graph mean consensus times")
    exact.add_argument("--n-list", required=True, type=_parse_n_list)
    exact.add_argument("--alpha", required=True, type=float)
    exact.add_argument("--p", required=True, type=float)
    exact.add_argument("--out", help="write CSV here instead of stdout")

    thr = sub.add_parser("threshold", help="drift extrema and critical start fraction")
    thr.add_argument("--alpha", required=True, type=float)
    thr.add_argument("--tol", type=float, default=1e-10)
    thr.add_argument("--p", type=float, default=None,
                     help="also classify the regime of this start fraction")
    thr.add_argument("--out", help="write JSON here instead of stdout")
    return parser


def _write_text(out: Optional[str], text: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _graph_spec(parser: argparse.ArgumentParser, args: argparse.Namespace) -> GraphSpec:
    given = {
        "--d": args.d is not None,
        "--d-rule": args.d_rule is not None,
        "--pedge": args.pedge is not None,
        "--pedge-rule": args.pedge_rule is not None,
    }
    allowed = {
        "complete": (),
        "regular": ("--d", "--d-rule"),
        "er": ("--pedge", "--pedge-rule"),
    }[args.graph]
    stray = [flag for flag, on in given.items() if on and flag not in allowed]
    if stray:
        parser.error(f"{', '.join(stray)} not valid with --graph {args.graph}")
    if allowed and sum(given[flag] for flag in allowed) != 1:
        parser.error(f"--graph {args.graph} needs exactly one of {' / '.join(allowed)}")
    try:
        return GraphSpec(
            kind=args.graph,
            degree=args.d,
            degree_rule=args.d_rule,
            p_edge=args.pedge,
            p_edge_rule=args.pedge_rule,
            log_base=args.log_base,
        )
    except ValueError as exc:
        parser.error(str(exc))


def cmd_simulate(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    graph = _graph_spec(parser, args)
    try:
        params = ModelParams(alpha=args.alpha, p=args.p)
        if params.alpha == 0.0:
            raise ValueError("simulation requires alpha > 0")
        spec = ExperimentSpec(
            graph=graph,
            params=params,
            n=args.n_list[0],
            trials=args.trials,
            master_seed=args.seed,
            step_cap=args.step_cap,
        )
        # Infeasible graph parameters are knowable up front; refuse early.
        for n in args.n_list:
            parameter = graph.resolve(n)
            if graph.kind == "regular":
                if not 0 <= int(parameter) < n:
                    raise ValueError(f"degree {parameter} invalid for n={n}")
                if (n * int(parameter)) % 2 != 0:
                    raise ValueError(f"no {parameter}-regular graph on {n} nodes")
    except ValueError as exc:
        parser.error(str(exc))

    points = sweep(spec, args.n_list, jobs=args.jobs)
    lines = [SIMULATE_HEADER]
    degraded = False
    for point in points:
        stats = point.stats
        if stats is None:
            degraded = True
            capped = (
                point.failure.capped_count
                if isinstance(point.failure, AllTrialsCappedError)
                else 0
            )
            mean = ci_low = ci_high = norm = math.nan
            print(f"twochoices: n={point.n}: {point.error}", file=sys.stderr)
        else:
            capped = stats.capped_count
            degraded = degraded or capped > 0
            mean, ci_low, ci_high = stats.mean, stats.ci_low, stats.ci_high
            norm = point.normalized_mean
        lines.append(
            ",".join(
                [
                    graph.kind,
                    str(point.n),
                    _fmt(point.graph_parameter),
                    _fmt(args.alpha),
                    _fmt(args.p),
                    str(args.trials),
                    _fmt(mean),
                    _fmt(ci_low),
                    _fmt(ci_high),
                    str(capped),
                    str(args.seed),
                    _fmt(norm),
                ]
            )
        )
    _write_text(args.out, "\n".join(lines) + "\n")
    return 1 if degraded else 0


def cmd_exact(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    lines = [EXACT_HEADER]
    try:
        for n in args.n_list:
            mean = analysis.mean_consensus_time(n, args.alpha, args.p)
            bound = analysis.consensus_time_lower_bound(n, args.alpha, args.p)
            lines.append(
                ",".join(
                    [
                        str(n),
                        _fmt(args.alpha),
                        _fmt(args.p),
                        _fmt(mean.value),
                        _fmt(mean.log10),
                        _fmt(bound),
                    ]
                )
            )
    except ValueError as exc:
        parser.error(str(exc))
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_threshold(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    try:
        report = analysis.threshold_report(args.alpha, tol=args.tol, p=args.p)
    except ValueError as exc:
        parser.error(str(exc))
    _write_text(args.out, json.dumps(report.to_dict(), indent=2) + "\n")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {
        "simulate": cmd_simulate,
        "exact": cmd_exact,
        "threshold": cmd_threshold,
    }[args.command]
    return handler(parser, args)


if __name__ == "__main__":
    sys.exit(main())

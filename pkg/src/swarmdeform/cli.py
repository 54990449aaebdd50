"""Command-line interface.

Four subcommands: simulate (integrate a scenario to a trace CSV), verify
(evaluate safety/liveness formulas and the sufficient conditions against a
recorded trace), margins (initial-formation safety margins) and weights
(the follower consensus weight table).

Exit codes, disjoint by failure class:
  0  success (all requested checks satisfied)
  1  input/output or usage problem
  2  simulation fault (divergence or leader-configuration collapse)
  3  verification failure (some requested formula unsatisfied)
  4  infeasible margins (deviation bound exceeds delta_max)
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .conditions import PSI_NAMES, build_conditions
from .dynamics import SimulationFault, simulate
from .formula_text import FormulaSyntaxError, parse_formula
from .geometry import CONTAIN_TOL, DegenerateSimplexError, Simplex, barycentric
from .ltl import satisfies
from .report import build_report, write_plot_data
from .safety import check_leader_only, check_theorem1, compute_margins
from .scenario import ScenarioError, load_scenario
from .trace_io import read_trace, write_trace


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="swarmdeform",
        description="Simulate and verify leader-follower continuum-deformation coordination.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="integrate a scenario and write the trace CSV")
    p_sim.add_argument("scenario", help="scenario JSON file")
    p_sim.add_argument("out", help="output trace CSV path")
    p_sim.add_argument("--h", type=float, default=None, help="override integration step (s)")
    p_sim.add_argument("--tf", type=float, default=None, help="override final time (s)")
    p_sim.set_defaults(func=cmd_simulate)

    p_ver = sub.add_parser("verify", help="check formulas and sufficient conditions on a trace")
    p_ver.add_argument("scenario", help="scenario JSON file")
    p_ver.add_argument("trace", help="trace CSV produced by simulate")
    p_ver.add_argument(
        "--formulas",
        default=",".join(PSI_NAMES),
        help="comma-separated subset of psi1..psi8 (default: all)",
    )
    p_ver.add_argument("--custom", default=None, help="file with extra formulas, one per line")
    p_ver.add_argument("--report", default=None, help="also write the report JSON to this path")
    p_ver.add_argument(
        "--plot-data",
        default=None,
        metavar="DIR",
        help="write deviation/eigenvalue CSVs and PNG figures to DIR",
    )
    p_ver.add_argument(
        "--margin-inflate",
        type=float,
        default=0.0,
        metavar="RHO",
        help="tighten sampled checks: deviation bound -RHO, separation radius +RHO, "
        "containment slack +RHO (guards against inter-sample excursions)",
    )
    p_ver.add_argument(
        "--strict-containment",
        action="store_true",
        help="require strictly positive barycentric coordinates in containment atoms",
    )
    p_ver.set_defaults(func=cmd_verify)

    p_mar = sub.add_parser("margins", help="print initial-formation safety margins")
    p_mar.add_argument("scenario", help="scenario JSON file")
    p_mar.set_defaults(func=cmd_margins)

    p_wts = sub.add_parser("weights", help="print the follower consensus weight table")
    p_wts.add_argument("scenario", help="scenario JSON file")
    p_wts.set_defaults(func=cmd_weights)
    return parser


def cmd_simulate(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except (ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        trace = simulate(scenario, h=args.h, tf=args.tf)
    except SimulationFault as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, DegenerateSimplexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        write_trace(trace, args.out)
    except OSError as exc:
        print(f"error: cannot write trace: {exc}", file=sys.stderr)
        return 1
    print(
        f"wrote {trace.n_samples} samples x {trace.n_agents} agents "
        f"(t = {trace.times[0]:g}..{trace.times[-1]:g} s) to {args.out}"
    )
    return 0


def _requested_names(spec: str) -> list[str]:
    names = [token.strip() for token in spec.split(",") if token.strip()]
    for name in names:
        if name not in PSI_NAMES:
            raise _UsageError(f"unknown formula name {name!r}; expected psi1..psi8")
    if not names:
        raise _UsageError("empty formula list")
    return names


def cmd_verify(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
        trace = read_trace(args.trace)
    except (ScenarioError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if trace.dim != scenario.dimension or set(trace.agent_ids) != set(scenario.agent_ids()):
        print("error: trace does not match scenario (dimension or agent ids)", file=sys.stderr)
        return 1
    trace = trace.with_derived(scenario.leaders)

    names = _requested_names(args.formulas)
    if "psi6" in names and not scenario.final_positions:
        print("error: psi6 requested but scenario has no final_positions", file=sys.stderr)
        return 1
    try:
        formulas = build_conditions(
            scenario,
            names,
            margin_inflate=args.margin_inflate,
            strict_containment=args.strict_containment,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.custom:
        try:
            with open(args.custom) as fh:
                lines = [ln.strip() for ln in fh]
        except OSError as exc:
            print(f"error: cannot read custom formulas: {exc}", file=sys.stderr)
            return 1
        count = 0
        for ln in lines:
            if not ln or ln.startswith("#"):
                continue
            count += 1
            try:
                formulas[f"custom{count}"] = parse_formula(
                    ln, agent_ids=scenario.agent_ids(), dimension=scenario.dimension
                )
            except FormulaSyntaxError as exc:
                print(f"error: custom formula {count}: {exc}", file=sys.stderr)
                return 1

    verdicts = {name: satisfies(phi, trace) for name, phi in formulas.items()}
    margins = compute_margins(scenario)
    theorem1 = check_theorem1(trace, margins) if margins.feasible else None
    leader_checks = {}
    if scenario.motion_space:
        leader_checks["psi7"] = check_leader_only(trace, scenario, "psi7")
    leader_checks["psi8"] = check_leader_only(trace, scenario, "psi8")

    report = build_report(
        trace,
        formulas,
        verdicts,
        margins=margins,
        theorem1=theorem1,
        leader_checks=leader_checks,
        margin_inflate=args.margin_inflate,
    )
    text = json.dumps(report, indent=2)
    print(text)
    if args.report:
        try:
            with open(args.report, "w") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=sys.stderr)
            return 1
    if args.plot_data:
        try:
            write_plot_data(trace, args.plot_data, margins=margins)
        except OSError as exc:
            print(f"error: cannot write plot data: {exc}", file=sys.stderr)
            return 1
    return 0 if report["satisfied"] else 3


def cmd_margins(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except (ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    margins = compute_margins(scenario)
    print(json.dumps(margins.to_dict(), indent=2))
    return 0 if margins.feasible else 4


def cmd_weights(args) -> int:
    try:
        scenario = load_scenario(args.scenario, strict=False)
    except (ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    positions = scenario.initial_positions()
    d = scenario.dimension
    head_nbrs = " ".join(f"i_{k + 1}" for k in range(d + 1))
    head_w = " ".join(f"w_{k + 1}" for k in range(d + 1))
    print(f"{'i':>3} | {head_nbrs} | {head_w}")
    for spec in sorted(scenario.followers, key=lambda f: f.id):
        nbrs = " ".join(f"{j:>3}" for j in spec.neighbors)
        try:
            w = barycentric(Simplex([positions[j] for j in spec.neighbors]), positions[spec.id])
        except DegenerateSimplexError:
            print(f"{spec.id:>3} | {nbrs} | (degenerate neighbor simplex)")
            print(
                f"warning: follower {spec.id} has a degenerate neighbor configuration",
                file=sys.stderr,
            )
            continue
        print(f"{spec.id:>3} | {nbrs} | " + " ".join(f"{x:.6f}" for x in w))
        if np.any(w < -CONTAIN_TOL):
            print(
                f"warning: follower {spec.id} has negative weights "
                "(not inside its neighbor simplex; assumption violated)",
                file=sys.stderr,
            )
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

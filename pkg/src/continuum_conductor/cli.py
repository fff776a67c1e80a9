"""Command line front end: assess answers, derive plans, simulate, compare."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import fixtures
from .conductor import Phase, TieBreak, decide_all
from .continuum import load_topology
from .errors import DomainError, InputError
from .pipeline import load_rules
from .placement import load_plan, plan_from_verdicts, save_plan
from .scenario import generate_scenario, load_config
from .simulator import (
    compare,
    format_comparison_table,
    format_metrics_table,
    load_metrics,
    run_scenario,
    save_metrics,
)
from .events import write_log

DEFAULT_PORT = 8787


def _load_demands(path):
    with open(path, encoding="utf-8") as fh:
        return fixtures.demands_from_json(json.load(fh))


def _print_hints(exc) -> None:
    for hint in getattr(exc, "hints", ()):
        print(f"hint ({hint.kind.value}): {hint.text}", file=sys.stderr)


def _assessment_from_args(args):
    assessment = fixtures.load_assessment(args.answers)
    if args.tie_break:
        tie = (
            TieBreak.PREFER_CENTRALIZED
            if args.tie_break == "central"
            else TieBreak.PREFER_DECENTRALIZED
        )
        assessment = type(assessment)(answers=assessment.answers, tie_break=tie)
    return assessment


def _mark_critical(ids, critical) -> str:
    critical = set(critical)
    return ", ".join(f"{i}!" if i in critical else i for i in ids) or "-"


def cmd_assess(args) -> int:
    verdicts = decide_all(_assessment_from_args(args))
    rows = []
    for phase in Phase:
        v = verdicts[phase]
        rows.append(
            (
                phase.key,
                v.outcome.value,
                _mark_critical(v.centralized_ids, v.centralized_critical_ids),
                _mark_critical(v.decentralized_ids, v.decentralized_critical_ids),
            )
        )
    widths = [max(len(r[i]) for r in rows + [_HEADER]) for i in range(4)]
    for row in [_HEADER, *rows]:
        print("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())

    conflicted = [p for p in Phase if verdicts[p].resolution_hints]
    for phase in conflicted:
        print()
        print(f"conflict in {phase.key}:")
        for hint in verdicts[phase].resolution_hints:
            print(f"  hint ({hint.kind.value}): {hint.text}")
    return 2 if conflicted else 0


_HEADER = ("phase", "outcome", "centralized", "decentralized")


def cmd_plan(args) -> int:
    assessment = _assessment_from_args(args)
    topology = load_topology(args.topology)
    demands = _load_demands(args.demands)
    rules = fixtures.port_rules() if args.rules is None else load_rules(args.rules)
    plan = plan_from_verdicts(
        decide_all(assessment),
        topology,
        demands,
        preprocess=fixtures.port_preprocess_config(),
        rules=rules,
        watermark=args.watermark,
    )
    save_plan(plan, args.out)
    for phase in Phase:
        print(f"{phase.key}: {plan.assignment[phase].key}")
    print(f"plan written to {args.out}")
    return 0


def cmd_simulate(args) -> int:
    plan = load_plan(args.plan)
    topology = load_topology(args.topology)
    config = load_config(args.scenario)
    skews = {n.node_id: n.clock_skew for n in topology.nodes}
    scenario = generate_scenario(config, skews)
    log, metrics = run_scenario(plan, scenario, topology)
    save_metrics(metrics, args.out_metrics)
    write_log(log, args.out_log)
    print(format_metrics_table(metrics))
    return 0


def cmd_compare(args) -> int:
    report = compare(load_metrics(args.a), load_metrics(args.b))
    print(format_comparison_table(report))
    return 0


def cmd_fixtures(args) -> int:
    if args.fixtures_command == "install":
        written = fixtures.install(args.directory)
        for path in written:
            print(f"wrote {path}")
        return 0
    raise InputError(f"unknown fixtures command {args.fixtures_command!r}")


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    if args.fixtures_dir:
        fixtures.install(args.fixtures_dir)
    static = args.static_dir
    if static is None and os.path.isdir("frontend/dist"):
        static = "frontend/dist"
    app = create_app(static_dir=static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conduct",
        description="Decide pipeline placement on the edge-cloud continuum and simulate it.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("assess", help="aggregate answers into per-phase verdicts")
    p.add_argument("--answers", required=True)
    p.add_argument("--tie-break", choices=["central", "decentral"])
    p.set_defaults(fn=cmd_assess)

    p = sub.add_parser("plan", help="derive a placement plan from answers")
    p.add_argument("--answers", required=True)
    p.add_argument("--topology", required=True)
    p.add_argument("--demands", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--rules", help="fusion rules file (default: shipped port rules)")
    p.add_argument("--watermark", type=float, default=20.0)
    p.add_argument("--tie-break", choices=["central", "decentral"])
    p.set_defaults(fn=cmd_plan)

    p = sub.add_parser("simulate", help="run a plan over a scenario deterministically")
    p.add_argument("--plan", required=True)
    p.add_argument("--scenario", required=True)
    p.add_argument("--topology", required=True)
    p.add_argument("--out-metrics", required=True)
    p.add_argument("--out-log", required=True)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("compare", help="delta table of two metrics files")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("fixtures", help="manage shipped fixtures")
    fix_sub = p.add_subparsers(dest="fixtures_command", required=True)
    inst = fix_sub.add_parser("install", help="write all shipped fixture files")
    inst.add_argument("directory")
    p.set_defaults(fn=cmd_fixtures)

    p = sub.add_parser("serve", help="serve the HTTP API (and UI when built)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=int(os.environ.get("CONDUCT_PORT", DEFAULT_PORT)))
    p.add_argument("--static-dir")
    p.add_argument("--fixtures-dir")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (InputError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        _print_hints(exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())

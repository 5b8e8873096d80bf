"""Command-line interface.

    paraverify run <scenario|path> [--samples N] [--tol T] [--seed S] [--format json|text]
    paraverify list
    paraverify export <scenario> -o file.json

Exit codes: 0 when every check passes, 1 when some check fails, 2 for
configuration or scenario errors (including degeneracies that abort a battery,
which are also surfaced as failed checks with a diagnostic).
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from .errors import ParaverifyError
from .scenarios import get_scenario, list_scenarios, load_scenario_file, run_scenario


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paraverify",
        description="numerical verification of almost paracontact metric "
                    "structures, submanifold immersions and warped products",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a builtin scenario or a scenario JSON file")
    run_p.add_argument("scenario", help="builtin name or path to a scenario document")
    run_p.add_argument("--samples", type=int, default=None, help="sample points per check")
    run_p.add_argument("--tol", type=float, default=None, help="base tolerance (default 1e-8)")
    run_p.add_argument("--seed", type=int, default=None, help="PRNG seed (default 42)")
    run_p.add_argument("--format", choices=("text", "json"), default="text")

    sub.add_parser("list", help="list builtin scenarios")

    exp_p = sub.add_parser("export", help="write a builtin scenario as a JSON document")
    exp_p.add_argument("scenario", help="builtin name")
    exp_p.add_argument("-o", "--output", required=True, help="output path")
    return parser


def _resolve(name: str):
    if os.path.exists(name) or name.endswith(".json"):
        return load_scenario_file(name)
    return get_scenario(name)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "list":
        for name, description in list_scenarios():
            print(f"{name:22s} {description}")
        return 0

    try:
        if args.command == "export":
            scenario = get_scenario(args.scenario)
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(scenario.to_json())
                fh.write("\n")
            print(f"wrote {args.output}")
            return 0

        scenario = _resolve(args.scenario)
        cfg = scenario.config()
        overrides = {
            k: v for k, v in
            (("samples", args.samples), ("tol", args.tol), ("seed", args.seed))
            if v is not None
        }
        if overrides:
            cfg = dataclasses.replace(cfg, **overrides)
    except (ParaverifyError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2

    report = run_scenario(scenario, cfg)
    print(report.to_json() if args.format == "json" else report.to_text())
    if report.verdicts.get("error"):
        return 2
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())

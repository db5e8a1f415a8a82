"""Command-line entry point: scenario runs, placement, equity reports, and
the HTTP service. Exit codes: 0 ok, 2 bad config or input, 3 infeasible
placement.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from .equity import equity_report
from .errors import (
    ConfigError,
    DegenerateDistributionError,
    InfeasiblePlacementError,
    InputError,
    ShelterAccessError,
)
from .placement import PlacementParams, place_capacity_based, place_distance_based
from .scenario import ScenarioStageError, export_result, load_config, run, zone_groups

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_ingest(args) -> int:
    from .workspace import Workspace

    try:
        ws = Workspace.load(args.workspace)
    except ShelterAccessError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    summary = {
        "workspace": str(ws.path),
        "hash": ws.content_hash,
        "nodes": len(ws.graph.nodes),
        "edges": len(ws.graph.edges),
        "cells": len(ws.cells),
        "population": sum(c.population for c in ws.cells),
        "shelters_open": len(ws.open_shelters()),
        "shelters_candidate": len(ws.candidate_shelters()),
        "zones": len(ws.zones),
        "perimeters": len(ws.perimeters),
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_run(args) -> int:
    try:
        config = load_config(args.config)
    except ShelterAccessError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    try:
        result = run(config)
    except ScenarioStageError as exc:
        if isinstance(exc.cause, InfeasiblePlacementError):
            return _fail(str(exc), EXIT_INFEASIBLE)
        return _fail(str(exc), EXIT_CONFIG)
    except InfeasiblePlacementError as exc:
        return _fail(str(exc), EXIT_INFEASIBLE)
    except ShelterAccessError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    paths = export_result(result, args.out)
    print(json.dumps({name: str(p) for name, p in sorted(paths.items())}, indent=2))
    return EXIT_OK


def cmd_place(args) -> int:
    from .workspace import Workspace

    try:
        ws = Workspace.load(args.workspace)
        params = PlacementParams(k=args.k, ring_step_m=args.ring_step)
    except ShelterAccessError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    cells = ws.demand_cells(exclude_fire=False)
    try:
        if args.method == "capacity":
            result = place_capacity_based(
                ws.candidate_shelters(),
                ws.zones,
                demand_total=sum(c.population for c in cells),
                params=params,
                open_shelters=ws.open_shelters(),
            )
        else:
            result = place_distance_based(
                ws.candidate_shelters(),
                zone_groups(ws.zones, cells),
                params=params,
                open_shelters=ws.open_shelters(),
            )
    except InfeasiblePlacementError as exc:
        return _fail(str(exc), EXIT_INFEASIBLE)
    except ShelterAccessError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    payload = {
        "method": result.method,
        "selected_ids": list(result.selected_ids),
        "total_capacity": result.total_capacity,
        "final_radius_m": result.final_radius_m,
        "per_zone": {
            name: {
                "shelter_ids": list(z.shelter_ids),
                "capacity": z.capacity,
                "demand": z.demand,
                "radius_m": z.radius_m,
            }
            for name, z in result.per_zone.items()
        },
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(text)
    return EXIT_OK


def cmd_gini(args) -> int:
    try:
        with open(args.scores, newline="", encoding="utf-8") as f:
            reader = csv.DictReader(f)
            if reader.fieldnames is None or "score" not in reader.fieldnames:
                return _fail(f"{args.scores}: need a 'score' column", EXIT_CONFIG)
            has_population = "population" in reader.fieldnames
            cells = [
                (float(row["population"]) if has_population else 1.0, float(row["score"]))
                for row in reader
            ]
    except (OSError, ValueError) as exc:
        return _fail(f"cannot read scores: {exc}", EXIT_CONFIG)
    try:
        report = equity_report(cells)
    except (DegenerateDistributionError, InputError) as exc:
        return _fail(str(exc), EXIT_CONFIG)
    print(json.dumps(report))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    from .workspace import Workspace

    workspace_dir = args.workspace or os.environ.get("SHELTER_WORKSPACE")
    if not workspace_dir:
        return _fail("no workspace: pass --workspace or set SHELTER_WORKSPACE", EXIT_CONFIG)
    try:
        ws = Workspace.load(workspace_dir)
    except ShelterAccessError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    frontend = args.frontend
    if frontend is None:
        bundled = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        frontend = bundled if bundled.is_dir() else None
    app = create_app(ws, frontend_dir=frontend)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shelteraccess")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a workspace directory and print a summary")
    p.add_argument("--workspace", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("run", help="run a scenario config and export results")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("place", help="select additional shelters for a workspace")
    p.add_argument("--workspace", required=True)
    p.add_argument("--method", choices=["capacity", "distance"], required=True)
    p.add_argument("--k", type=float, default=2.0)
    p.add_argument("--ring-step", type=float, default=1609.34, dest="ring_step")
    p.add_argument("--out")
    p.set_defaults(func=cmd_place)

    p = sub.add_parser("gini", help="equity report for a scores CSV")
    p.add_argument("--scores", required=True)
    p.set_defaults(func=cmd_gini)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--workspace")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--frontend", help="directory of built UI assets to serve at /")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail(str(exc), EXIT_CONFIG)


if __name__ == "__main__":
    sys.exit(main())

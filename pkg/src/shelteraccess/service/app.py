"""HTTP facade over the engine for interactive what-if exploration.

The workspace is immutable while serving; every compute is a pure function of
(workspace hash, request body) and responses are cached on that key.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import replace as dc_replace
from pathlib import Path

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..access import CLASS_LABELS, ClassificationScheme, DecayParams, classify, e2sfca, nearest_shelter_times
from ..catalog import Shelter, demand_summary, effective_capacity
from ..equity import gini
from ..errors import (
    DegenerateDistributionError,
    InfeasiblePlacementError,
    InputError,
    UnsnappableError,
)
from ..geometry import polygon_feature
from ..placement import PlacementParams, place_capacity_based, place_distance_based
from ..scenario import zone_groups
from ..workspace import Workspace
from .models import ComputeRequest, ComputeResponse, PlacementRequest, PlacementResponse

# network/demand wiring per base scenario id
PRESETS = {
    "case2": {"closures": True, "congestion": False, "exclude_fire": True},
    "case3": {"closures": True, "congestion": True, "exclude_fire": True},
    "case4": {"closures": False, "congestion": True, "exclude_fire": False},
}

LAYERS = ("zones", "grid", "shelters", "perimeters")


def _canonical(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


class Engine:
    """Compute core shared by the endpoints, with response caching."""

    def __init__(self, workspace: Workspace):
        self.workspace = workspace
        self._cache: dict[str, dict] = {}
        self._ref_max: dict[str, float | None] = {}
        self._lock = threading.Lock()

    def _decay(self, override) -> DecayParams:
        if override is None:
            return DecayParams()
        return DecayParams(
            sigma_min=override.sigma_minutes or 30.0,
            t0_min=override.t0_minutes or 120.0,
        )

    def _score(self, preset: str, congestion: bool, supply: list[Shelter], decay: DecayParams):
        rules = PRESETS[preset]
        cells = self.workspace.demand_cells(rules["exclude_fire"])
        matrix = self.workspace.matrix(
            rules["closures"], congestion, rules["exclude_fire"], decay.t0_min
        )
        ratios, access = e2sfca(cells, supply, matrix, decay)
        return cells, ratios, access

    def reference_max(self, preset: str, congestion: bool) -> float | None:
        """Legend reference: max score of the untoggled scenario, default decay."""
        key = f"{preset}:{congestion}"
        with self._lock:
            if key in self._ref_max:
                return self._ref_max[key]
        _, _, access = self._score(
            preset, congestion, self.workspace.open_shelters(), DecayParams()
        )
        ref = max((r.score for r in access), default=0.0)
        value = ref if ref > 0 else None
        with self._lock:
            self._ref_max[key] = value
        return value

    def compute(
        self,
        preset: str,
        supply: list[Shelter],
        *,
        congestion: bool | None = None,
        decay_override=None,
        cache_key: str | None = None,
    ) -> dict:
        if cache_key is not None:
            with self._lock:
                hit = self._cache.get(cache_key)
            if hit is not None:
                body = dict(hit)
                body["cached"] = True
                return body

        started = time.perf_counter()
        rules = PRESETS[preset]
        effective_congestion = rules["congestion"] if congestion is None else congestion
        decay = self._decay(decay_override)
        cells, ratios, access = self._score(preset, effective_congestion, supply, decay)

        ref_max = self.reference_max(preset, effective_congestion)
        current_max = max((r.score for r in access), default=0.0)
        scheme_max = ref_max if ref_max else (current_max if current_max > 0 else None)
        if scheme_max:
            access, scheme = classify(access, ClassificationScheme(ref_max=scheme_max))
        else:
            access = [dc_replace(r, label="No Access") for r in access]

        pairs = [(c.population, r.score) for c, r in zip(cells, access)]
        gini_value, gini_reason = None, None
        try:
            gini_value = gini(pairs)
        except DegenerateDistributionError as exc:
            gini_reason = str(exc)

        network = self.workspace.network(rules["closures"], effective_congestion)
        supply_as_open = [
            Shelter(
                id=s.id, name=s.name, location=s.location, capacity=s.capacity,
                floor_area=s.floor_area, area_unit=s.area_unit, status="open",
                occupied=s.occupied,
            )
            for s in supply
        ]
        nearest = nearest_shelter_times(cells, supply_as_open, network, self.workspace.snap_radius_m)
        summary = demand_summary(cells, supply_as_open)

        body = {
            "scenario": preset,
            "supply_ids": [s.id for s in supply],
            "cells": [
                {
                    "cell_id": c.id,
                    "score": r.score,
                    "label": r.label,
                    "population": c.population,
                    "nearest_minutes": nearest.get(c.id),
                }
                for c, r in zip(cells, access)
            ],
            "gini": gini_value,
            "gini_reason": gini_reason,
            "summary": {
                "total_order": summary.total_order,
                "total_warning": summary.total_warning,
                "total": summary.total,
                "total_supply": summary.total_supply,
                "gap": summary.gap,
            },
            "max_score": current_max if access else None,
            "ref_max": scheme_max,
            "class_labels": list(CLASS_LABELS),
            "compute_ms": (time.perf_counter() - started) * 1000.0,
            "cached": False,
        }
        if cache_key is not None:
            with self._lock:
                self._cache[cache_key] = body
        return body


def create_app(workspace: Workspace, frontend_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="shelteraccess", version="0.1.0", docs_url="/docs", openapi_url="/openapi.json")
    engine = Engine(workspace)
    app.state.workspace = workspace
    app.state.engine = engine

    @app.get("/api/spec")
    def api_spec() -> JSONResponse:
        return JSONResponse(app.openapi())

    @app.get("/api/layers/{layer}")
    def layer(layer: str) -> JSONResponse:
        if layer not in LAYERS:
            return JSONResponse(
                status_code=404,
                content={"error": f"unknown layer {layer!r}; expected one of {list(LAYERS)}"},
            )
        if layer == "zones":
            features = [polygon_feature(z) for z in workspace.zones]
        elif layer == "perimeters":
            features = [polygon_feature(z) for z in workspace.perimeters]
        elif layer == "grid":
            features = [
                {
                    "type": "Feature",
                    "geometry": {"type": "Point", "coordinates": [c.centroid.lon, c.centroid.lat]},
                    "properties": {
                        "cell_id": c.id,
                        "population": c.population,
                        "zone": c.zone_tag,
                        "zone_name": c.zone_name,
                        "in_fire": c.in_fire,
                    },
                }
                for c in workspace.cells
            ]
        else:
            features = [
                {
                    "type": "Feature",
                    "geometry": {"type": "Point", "coordinates": [s.location.lon, s.location.lat]},
                    "properties": {
                        "id": s.id,
                        "name": s.name,
                        "status": s.status,
                        "capacity": s.capacity,
                        "floor_area": s.floor_area,
                        "effective_capacity": effective_capacity(s),
                        "occupied": s.occupied,
                    },
                }
                for s in workspace.shelters
            ]
        return JSONResponse({"type": "FeatureCollection", "features": features})

    @app.post("/api/accessibility", response_model=ComputeResponse)
    def accessibility(request: ComputeRequest):
        if request.scenario not in PRESETS:
            return JSONResponse(
                status_code=422,
                content={"error": f"unknown scenario {request.scenario!r}; expected one of {list(PRESETS)}"},
            )
        known = {s.id for s in workspace.shelters}
        unknown = sorted((set(request.enable) | set(request.disable)) - known)
        if unknown:
            return JSONResponse(
                status_code=422,
                content={"error": "unknown shelter ids", "unknown_ids": unknown},
            )
        enabled = set(request.enable)
        disabled = set(request.disable)
        supply = [
            s
            for s in workspace.shelters
            if (s.status == "open" or s.id in enabled) and s.id not in disabled
        ]
        cache_key = hashlib.sha256(
            (workspace.content_hash + _canonical(request.model_dump())).encode()
        ).hexdigest()
        try:
            body = engine.compute(
                request.scenario,
                supply,
                congestion=request.congestion,
                decay_override=request.decay,
                cache_key=cache_key,
            )
        except (InputError, UnsnappableError) as exc:
            return JSONResponse(status_code=422, content={"error": str(exc)})
        return JSONResponse(body)

    @app.post("/api/placement", response_model=PlacementResponse)
    def placement(request: PlacementRequest):
        try:
            params = PlacementParams(k=request.k, ring_step_m=request.ring_step_m)
        except InputError as exc:
            return JSONResponse(status_code=422, content={"error": str(exc)})
        cells = workspace.demand_cells(exclude_fire=False)
        opens = workspace.open_shelters()
        candidates = workspace.candidate_shelters()
        try:
            if request.method == "capacity":
                result = place_capacity_based(
                    candidates,
                    workspace.zones,
                    demand_total=sum(c.population for c in cells),
                    params=params,
                    open_shelters=opens,
                )
            else:
                result = place_distance_based(
                    candidates,
                    zone_groups(workspace.zones, cells),
                    params=params,
                    open_shelters=opens,
                )
        except InfeasiblePlacementError as exc:
            return JSONResponse(
                status_code=409,
                content={"error": str(exc), "shortfall": exc.shortfall, "zone": exc.zone},
            )
        selected = set(result.selected_ids)
        supply = [s for s in workspace.shelters if s.id in selected]
        cache_key = hashlib.sha256(
            (workspace.content_hash + _canonical({"placement": request.model_dump()})).encode()
        ).hexdigest()
        try:
            compute_body = engine.compute("case4", supply, cache_key=cache_key)
        except (InputError, UnsnappableError) as exc:
            return JSONResponse(status_code=422, content={"error": str(exc)})
        return JSONResponse(
            {
                "placement": {
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
                },
                "compute": compute_body,
            }
        )

    if frontend_dir and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

    return app

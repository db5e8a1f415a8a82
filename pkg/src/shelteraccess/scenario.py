"""Scenario orchestration: declarative config, the four case pipelines,
and deterministic result export.

Each case wires the same stages differently: which network transformations
apply, which demand cells count, and which shelters supply capacity.
"""

from __future__ import annotations

import hashlib
import json
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from .access import (
    AccessResult,
    ClassificationScheme,
    DecayParams,
    SupplyRatio,
    classify,
    e2sfca,
    nearest_shelter_times,
)
from .catalog import (
    DemandCell,
    DemandSummary,
    Shelter,
    demand_summary,
    effective_capacity,
    filter_demand,
    load_population_csv,
    load_shelters_csv,
)
from .equity import LorenzPoint, gini, lorenz
from .errors import (
    ClassificationError,
    ConfigError,
    DegenerateDistributionError,
    ShelterAccessError,
)
from .geometry import GeoPolygon, load_polygon_layers
from .placement import PlacementParams, PlacementResult, ZoneDemand, place_capacity_based, place_distance_based
from .roadnet import (
    CongestionOverlay,
    RoadGraph,
    apply_closures,
    apply_congestion,
    derive_times,
    impute_speeds,
    load_roads_csv,
    load_roads_geojson,
    travel_matrix,
)

CASES = ("case1", "case2", "case3", "case4_capacity", "case4_distance")

# per-case wiring: network transformations, demand filter, supply source
CASE_RULES = {
    "case1": {"closures": False, "congestion": False, "exclude_fire": False, "scores": False, "placement": None},
    "case2": {"closures": True, "congestion": False, "exclude_fire": True, "scores": True, "placement": None},
    "case3": {"closures": True, "congestion": True, "exclude_fire": True, "scores": True, "placement": None},
    "case4_capacity": {"closures": False, "congestion": True, "exclude_fire": False, "scores": True, "placement": "capacity"},
    "case4_distance": {"closures": False, "congestion": True, "exclude_fire": False, "scores": True, "placement": "distance"},
}


class ScenarioStageError(ShelterAccessError):
    """Wraps a module error with the pipeline stage where it happened."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r}: {cause}")


@dataclass(frozen=True)
class ScenarioConfig:
    case: str
    roads: Path
    grid: Path
    shelters: Path
    zones: Path
    perimeters: Path | None = None
    decay: DecayParams = field(default_factory=DecayParams)
    congestion_buffer_m: float = 5000.0
    congestion_speed_cap_kph: float = 10.0
    placement: PlacementParams = field(default_factory=PlacementParams)
    snap_radius_m: float = 5000.0
    classification_reference: Path | None = None

    def __post_init__(self):
        if self.case not in CASES:
            raise ConfigError(f"unknown case {self.case!r}; expected one of {CASES}")
        if self.case in ("case2", "case3") and self.perimeters is None:
            raise ConfigError(f"{self.case} requires a fire perimeters layer")


def load_config(path: str | Path) -> ScenarioConfig:
    """Parse a YAML scenario config; relative input paths resolve against it."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a mapping")
    base = path.parent

    def resolve(p: str | None) -> Path | None:
        return (base / p).resolve() if p else None

    inputs = raw.get("inputs") or {}
    for key in ("roads", "grid", "shelters", "zones"):
        if key not in inputs:
            raise ConfigError(f"config missing inputs.{key}")
    decay_raw = raw.get("decay") or {}
    congestion_raw = raw.get("congestion") or {}
    placement_raw = raw.get("placement") or {}
    try:
        return ScenarioConfig(
            case=str(raw.get("case", "")),
            roads=resolve(inputs["roads"]),
            grid=resolve(inputs["grid"]),
            shelters=resolve(inputs["shelters"]),
            zones=resolve(inputs["zones"]),
            perimeters=resolve(inputs.get("perimeters")),
            decay=DecayParams(
                sigma_min=float(decay_raw.get("sigma_minutes", 30.0)),
                t0_min=float(decay_raw.get("t0_minutes", 120.0)),
            ),
            congestion_buffer_m=float(congestion_raw.get("buffer_m", 5000.0)),
            congestion_speed_cap_kph=float(congestion_raw.get("speed_cap_kph", 10.0)),
            placement=PlacementParams(
                k=float(placement_raw.get("k", 2.0)),
                ring_step_m=float(placement_raw.get("ring_step_m", 1609.34)),
            ),
            snap_radius_m=float(raw.get("snap_radius_m", 5000.0)),
            classification_reference=resolve(raw.get("classification_reference")),
        )
    except ShelterAccessError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"bad config value in {path}: {exc}") from exc


@dataclass
class ScenarioResult:
    case: str
    cells: list[DemandCell]
    shelters: list[Shelter]
    supply_ids: tuple[str, ...]
    access: list[AccessResult]
    ratios: list[SupplyRatio]
    nearest_minutes: dict[str, float]
    gini: float | None
    gini_reason: str | None
    lorenz_points: list[LorenzPoint]
    summary: DemandSummary
    placement: PlacementResult | None
    scheme: ClassificationScheme | None
    provenance: dict


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _config_fingerprint(config: ScenarioConfig) -> str:
    blob = json.dumps(
        {
            "case": config.case,
            "decay": [config.decay.sigma_min, config.decay.t0_min],
            "congestion": [config.congestion_buffer_m, config.congestion_speed_cap_kph],
            "placement": [config.placement.k, config.placement.ring_step_m],
            "snap_radius_m": config.snap_radius_m,
        },
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _load_roads(path: Path) -> RoadGraph:
    if path.suffix.lower() in (".geojson", ".json"):
        return load_roads_geojson(path)
    return load_roads_csv(path)


@contextmanager
def _stage(name: str):
    try:
        yield
    except ScenarioStageError:
        raise
    except ShelterAccessError as exc:
        raise ScenarioStageError(name, exc) from exc


def zone_groups(zones: list[GeoPolygon], cells: list[DemandCell]) -> list[ZoneDemand]:
    """One demand entry per zone name, in first-appearance order."""
    names: list[str] = []
    polys: dict[str, list[GeoPolygon]] = {}
    for z in zones:
        if z.name not in polys:
            names.append(z.name)
            polys[z.name] = []
        polys[z.name].append(z)
    demands = {name: 0.0 for name in names}
    for c in cells:
        if c.zone_name in demands:
            demands[c.zone_name] += c.population
    return [
        ZoneDemand(name=name, polygons=tuple(polys[name]), demand=demands[name])
        for name in names
        if demands[name] > 0
    ]


def run(config: ScenarioConfig) -> ScenarioResult:
    rules = CASE_RULES[config.case]

    with _stage("load-inputs"):
        graph = _load_roads(config.roads)
        raw_cells = load_population_csv(config.grid)
        shelters = load_shelters_csv(config.shelters)
        zones = load_polygon_layers(config.zones, layers={"evac_order", "evac_warning"})
        perimeters = (
            load_polygon_layers(config.perimeters, layers={"fire_perimeter"})
            if config.perimeters
            else []
        )
        if not zones:
            raise ConfigError(f"{config.zones}: no evacuation zone polygons found")

    with _stage("build-network"):
        graph = derive_times(impute_speeds(graph))
    if rules["closures"]:
        with _stage("closures"):
            graph = apply_closures(graph, perimeters)
    if rules["congestion"]:
        with _stage("congestion"):
            overlay = CongestionOverlay(
                zones=tuple(zones),
                buffer_m=config.congestion_buffer_m,
                speed_cap_kph=config.congestion_speed_cap_kph,
            )
            graph = apply_congestion(graph, overlay)

    with _stage("demand"):
        cells = filter_demand(
            raw_cells,
            zones,
            perimeters,
            include={"order", "warning"},
            exclude_fire=rules["exclude_fire"],
        )

    open_shelters = [s for s in shelters if s.status == "open"]
    candidates = [s for s in shelters if s.status == "candidate"]
    placement_result: PlacementResult | None = None
    if rules["placement"] == "capacity":
        with _stage("placement"):
            if not candidates:
                raise ConfigError("case4 needs candidate shelters in the catalog")
            placement_result = place_capacity_based(
                candidates,
                zones,
                demand_total=sum(c.population for c in cells),
                params=config.placement,
                open_shelters=open_shelters,
            )
    elif rules["placement"] == "distance":
        with _stage("placement"):
            if not candidates:
                raise ConfigError("case4 needs candidate shelters in the catalog")
            placement_result = place_distance_based(
                candidates,
                zone_groups(zones, cells),
                params=config.placement,
                open_shelters=open_shelters,
            )

    if placement_result is not None:
        selected = set(placement_result.selected_ids)
        supply = [s for s in shelters if s.id in selected]
    else:
        supply = open_shelters
    supply_ids = tuple(s.id for s in supply)

    with _stage("summary"):
        summary = demand_summary(cells, [replace(s, status="open") for s in supply])

    access: list[AccessResult] = []
    ratios: list[SupplyRatio] = []
    nearest: dict[str, float] = {}
    scheme: ClassificationScheme | None = None
    gini_value: float | None = None
    gini_reason: str | None = None
    lorenz_points: list[LorenzPoint] = []

    if rules["scores"]:
        with _stage("travel-matrix"):
            matrix = travel_matrix(
                graph,
                [c.centroid for c in cells],
                [s.location for s in supply],
                cutoff_min=config.decay.t0_min,
                origin_ids=[c.id for c in cells],
                dest_ids=[s.id for s in supply],
                snap_radius_m=config.snap_radius_m,
            )
        with _stage("accessibility"):
            ratios, access = e2sfca(cells, supply, matrix, config.decay)
        with _stage("classify"):
            if config.classification_reference is not None:
                ref = json.loads(Path(config.classification_reference).read_text(encoding="utf-8"))
                ref_max = (ref.get("classification") or {}).get("ref_max")
                if not ref_max or ref_max <= 0:
                    raise ConfigError(
                        f"reference report {config.classification_reference} has no usable ref_max"
                    )
                scheme = ClassificationScheme(ref_max=float(ref_max))
            try:
                access, scheme = classify(access, scheme)
            except ClassificationError:
                access = [replace(r, label="No Access") for r in access]
                scheme = None
        with _stage("equity"):
            pairs = [(c.population, r.score) for c, r in zip(cells, access)]
            try:
                gini_value = gini(pairs)
                lorenz_points = lorenz(pairs)
            except DegenerateDistributionError as exc:
                gini_reason = str(exc)
    else:
        with _stage("nearest-times"):
            nearest = nearest_shelter_times(cells, supply, graph, config.snap_radius_m)
        gini_reason = "travel-time case produces no accessibility scores"

    provenance = {
        "config": _config_fingerprint(config),
        "inputs": {
            "roads": _sha256_file(config.roads),
            "grid": _sha256_file(config.grid),
            "shelters": _sha256_file(config.shelters),
            "zones": _sha256_file(config.zones),
            **({"perimeters": _sha256_file(config.perimeters)} if config.perimeters else {}),
        },
    }
    return ScenarioResult(
        case=config.case,
        cells=cells,
        shelters=shelters,
        supply_ids=supply_ids,
        access=access,
        ratios=ratios,
        nearest_minutes=nearest,
        gini=gini_value,
        gini_reason=gini_reason,
        lorenz_points=lorenz_points,
        summary=summary,
        placement=placement_result,
        scheme=scheme,
        provenance=provenance,
    )


def result_report(result: ScenarioResult) -> dict:
    """JSON-ready report; identical inputs must serialize byte-identically."""
    report = {
        "case": result.case,
        "provenance": result.provenance,
        "summary": {
            "total_order": result.summary.total_order,
            "total_warning": result.summary.total_warning,
            "total": result.summary.total,
            "total_supply": result.summary.total_supply,
            "gap": result.summary.gap,
        },
        "supply_ids": list(result.supply_ids),
        "gini": result.gini,
        "gini_reason": result.gini_reason,
        "lorenz": [[p.x, p.y] for p in result.lorenz_points],
        "max_score": max((r.score for r in result.access), default=None),
        "classification": (
            {"ref_max": result.scheme.ref_max, "breakpoints": result.scheme.breakpoints()}
            if result.scheme
            else None
        ),
        "placement": None,
        "nearest_minutes": result.nearest_minutes or None,
    }
    if result.placement is not None:
        report["placement"] = {
            "method": result.placement.method,
            "selected_ids": list(result.placement.selected_ids),
            "total_capacity": result.placement.total_capacity,
            "final_radius_m": result.placement.final_radius_m,
            "per_zone": {
                name: {
                    "shelter_ids": list(z.shelter_ids),
                    "capacity": z.capacity,
                    "demand": z.demand,
                    "radius_m": z.radius_m,
                }
                for name, z in result.placement.per_zone.items()
            },
        }
    return report


def _dump_json(payload: dict, path: Path) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def cells_feature_collection(result: ScenarioResult) -> dict:
    by_id = {r.cell_id: r for r in result.access}
    features = []
    for c in result.cells:
        r = by_id.get(c.id)
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [c.centroid.lon, c.centroid.lat]},
                "properties": {
                    "cell_id": c.id,
                    "population": c.population,
                    "zone": c.zone_tag,
                    "zone_name": c.zone_name,
                    "score": r.score if r else None,
                    "class": r.label if r else None,
                    "nearest_minutes": result.nearest_minutes.get(c.id),
                },
            }
        )
    return {"type": "FeatureCollection", "features": features}


def shelters_feature_collection(result: ScenarioResult) -> dict:
    selected = set(result.supply_ids)
    features = []
    for s in result.shelters:
        features.append(
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
                    "selected": s.id in selected,
                },
            }
        )
    return {"type": "FeatureCollection", "features": features}


def write_scores_csv(access: list[AccessResult], path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write("cell_id,score,class\n")
        for r in access:
            f.write(f"{r.cell_id},{r.score!r},{r.label}\n")


def read_scores_csv(path: str | Path) -> list[AccessResult]:
    import csv as _csv

    out = []
    with open(path, newline="", encoding="utf-8") as f:
        for row in _csv.DictReader(f):
            out.append(AccessResult(cell_id=row["cell_id"], score=float(row["score"]), label=row["class"]))
    return out


def export_result(result: ScenarioResult, out_dir: str | Path) -> dict[str, Path]:
    """Write report.json, scores.csv, cells.geojson, shelters.geojson."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "report": out / "report.json",
        "scores": out / "scores.csv",
        "cells": out / "cells.geojson",
        "shelters": out / "shelters.geojson",
    }
    _dump_json(result_report(result), paths["report"])
    write_scores_csv(result.access, paths["scores"])
    _dump_json(cells_feature_collection(result), paths["cells"])
    _dump_json(shelters_feature_collection(result), paths["shelters"])
    return paths

"""Greedy selection of additional shelters around evacuation zones.

Two strategies: capacity-based (ring filter to k x demand, then largest-first
refinement) and distance-based (per zone, expand rings until the zone's demand
is covered). Ring distances are straight-line meters from the zone polygons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .catalog import Shelter, effective_capacity
from .errors import InfeasiblePlacementError, InputError
from .geometry import GeoPolygon, LocalFrame, polygon_distance_m

MILE_M = 1609.34


@dataclass(frozen=True)
class PlacementParams:
    k: float = 2.0
    ring_step_m: float = MILE_M
    distance_mode: str = "straight_line"

    def __post_init__(self):
        if not self.k >= 1:
            raise InputError(f"capacity multiplier k must be >= 1, got {self.k}")
        if not self.ring_step_m > 0:
            raise InputError(f"ring step must be positive, got {self.ring_step_m}")
        if self.distance_mode != "straight_line":
            raise InputError(f"unsupported distance mode {self.distance_mode!r}")


@dataclass(frozen=True)
class ZoneDemand:
    name: str
    polygons: tuple[GeoPolygon, ...]
    demand: float


@dataclass(frozen=True)
class ZoneAssignment:
    shelter_ids: tuple[str, ...]
    capacity: float
    demand: float
    radius_m: float


@dataclass(frozen=True)
class PlacementResult:
    method: str
    selected_ids: tuple[str, ...]
    total_capacity: float
    final_radius_m: float
    per_zone: dict[str, ZoneAssignment]


def _zone_frame(polygons: list[GeoPolygon]) -> LocalFrame:
    points = [p for poly in polygons for p in poly.exterior]
    return LocalFrame.centered_on(points)


def _distance_to_zones(s: Shelter, polygons: list[GeoPolygon], frame: LocalFrame) -> float:
    return min(polygon_distance_m(s.location, poly, frame) for poly in polygons)


def place_capacity_based(
    candidates: list[Shelter],
    zones: list[GeoPolygon],
    demand_total: float,
    params: PlacementParams,
    open_shelters: list[Shelter] | None = None,
) -> PlacementResult:
    """Filter candidates by expanding rings until capacity reaches k x demand,
    then pick largest-first until the demand itself is covered.

    Pre-seeded open shelters are always selected and their capacity counts
    before any candidate's, in both phases.
    """
    if not demand_total > 0:
        raise InputError(f"demand must be positive, got {demand_total}")
    if not zones:
        raise InputError("capacity-based placement needs at least one zone polygon")
    open_shelters = open_shelters or []
    frame = _zone_frame(zones)

    open_cap = sum(effective_capacity(s) for s in open_shelters)
    ranked = sorted(
        (
            (_distance_to_zones(s, zones, frame), s.id, effective_capacity(s), s)
            for s in candidates
        ),
        key=lambda row: (row[0], row[1]),
    )
    threshold = params.k * demand_total
    available = open_cap + sum(cap for _, _, cap, _ in ranked)
    if available < threshold:
        raise InfeasiblePlacementError(shortfall=threshold - available)

    # filtering: smallest ring radius whose cumulative capacity reaches k x demand
    radius = 0.0
    filtered: list[tuple[float, str, float, Shelter]] = []
    if open_cap < threshold:
        cum = open_cap
        idx = 0
        while cum < threshold:
            radius += params.ring_step_m
            while idx < len(ranked) and ranked[idx][0] <= radius:
                filtered.append(ranked[idx])
                cum += ranked[idx][2]
                idx += 1

    # refinement: largest capacity first, ties by distance then id
    selected = [s for s in open_shelters]
    covered = open_cap
    for dist, sid, cap, shelter in sorted(filtered, key=lambda row: (-row[2], row[0], row[1])):
        if covered >= demand_total:
            break
        selected.append(shelter)
        covered += cap
    return PlacementResult(
        method="capacity",
        selected_ids=tuple(s.id for s in selected),
        total_capacity=covered,
        final_radius_m=radius,
        per_zone={},
    )


def place_distance_based(
    candidates: list[Shelter],
    zones: list[ZoneDemand],
    params: PlacementParams,
    open_shelters: list[Shelter] | None = None,
) -> PlacementResult:
    """Per zone (input order), widen rings and take everything inside until the
    zone's demand is covered; facilities claimed earlier are gone for later
    zones. Open shelters inside a zone's search count toward that zone."""
    if not zones:
        raise InputError("distance-based placement needs at least one zone")
    for z in zones:
        if not z.demand > 0:
            raise InputError(f"zone {z.name!r}: demand must be positive, got {z.demand}")
    open_shelters = open_shelters or []
    frame = _zone_frame([poly for z in zones for poly in z.polygons])

    pool: list[tuple[str, float, Shelter]] = [
        (s.id, effective_capacity(s), s) for s in open_shelters
    ] + [(s.id, effective_capacity(s), s) for s in candidates]
    claimed: set[str] = set()
    per_zone: dict[str, ZoneAssignment] = {}
    final_radius = 0.0

    for zone in zones:
        unclaimed = [
            (_distance_to_zones(s, list(zone.polygons), frame), sid, cap, s)
            for sid, cap, s in pool
            if sid not in claimed
        ]
        unclaimed.sort(key=lambda row: (row[0], row[1]))
        if sum(cap for _, _, cap, _ in unclaimed) < zone.demand:
            raise InfeasiblePlacementError(
                shortfall=zone.demand - sum(cap for _, _, cap, _ in unclaimed),
                zone=zone.name,
            )
        radius = 0.0
        taken: list[tuple[float, str, float]] = []
        tally = 0.0
        idx = 0
        while tally < zone.demand:
            radius += params.ring_step_m
            while idx < len(unclaimed) and unclaimed[idx][0] <= radius:
                dist, sid, cap, _ = unclaimed[idx]
                taken.append((dist, sid, cap))
                tally += cap
                idx += 1
        for _, sid, _ in taken:
            claimed.add(sid)
        per_zone[zone.name] = ZoneAssignment(
            shelter_ids=tuple(sid for _, sid, _ in taken),
            capacity=tally,
            demand=zone.demand,
            radius_m=radius,
        )
        final_radius = max(final_radius, radius)

    open_ids = [s.id for s in open_shelters]
    claimed_candidates = [
        sid for zone in zones for sid in per_zone[zone.name].shelter_ids if sid not in open_ids
    ]
    selected_ids = tuple(open_ids + claimed_candidates)
    caps = {sid: cap for sid, cap, _ in pool}
    return PlacementResult(
        method="distance",
        selected_ids=selected_ids,
        total_capacity=sum(caps[sid] for sid in selected_ids),
        final_radius_m=final_radius,
        per_zone=per_zone,
    )

"""Population grid and shelter catalogs: ingestion, capacity estimation,
zone tagging, demand filtering, and demand/supply summaries.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import InputError
from .geometry import GeoPoint, GeoPolygon, PolygonSet, point_in_polygon

SQFT_PER_SQM = 10.76391
USABLE_FRACTION = 0.70
SQFT_PER_PERSON = 100.0

ZONE_ORDER = "order"
ZONE_WARNING = "warning"
ZONE_NONE = "none"


@dataclass(frozen=True)
class DemandCell:
    id: str
    centroid: GeoPoint
    population: float
    zone_tag: str = ZONE_NONE
    zone_name: str = ""
    in_fire: bool = False

    def __post_init__(self):
        if self.population < 0:
            raise InputError(f"cell {self.id!r}: population must be >= 0")
        if self.zone_tag not in (ZONE_ORDER, ZONE_WARNING, ZONE_NONE):
            raise InputError(f"cell {self.id!r}: unknown zone tag {self.zone_tag!r}")


@dataclass(frozen=True)
class Shelter:
    id: str
    name: str
    location: GeoPoint
    capacity: float | None = None
    floor_area: float | None = None
    area_unit: str = "sqft"
    status: str = "open"
    occupied: float = 0.0

    def __post_init__(self):
        if self.capacity is None and self.floor_area is None:
            raise InputError(f"shelter {self.id!r}: needs capacity or floor_area")
        if self.capacity is not None and self.capacity < 0:
            raise InputError(f"shelter {self.id!r}: capacity must be >= 0")
        if self.status not in ("open", "candidate"):
            raise InputError(f"shelter {self.id!r}: unknown status {self.status!r}")
        if self.occupied < 0:
            raise InputError(f"shelter {self.id!r}: occupied must be >= 0")


def estimate_capacity(floor_area: float, unit: str = "sqft") -> int:
    """Persons a floor area can host: 70% usable space at 100 sqft per person."""
    if floor_area is None or floor_area <= 0:
        raise InputError(f"floor area must be positive, got {floor_area}")
    if unit == "sqm":
        area_sqft = floor_area * SQFT_PER_SQM
    elif unit == "sqft":
        area_sqft = floor_area
    else:
        raise InputError(f"unknown area unit {unit!r}")
    return math.floor(area_sqft * USABLE_FRACTION / SQFT_PER_PERSON)


def effective_capacity(s: Shelter) -> float:
    """Published capacity (preferred) or floor-area estimate, minus occupants."""
    base = s.capacity if s.capacity is not None else estimate_capacity(s.floor_area, s.area_unit)
    return max(0.0, base - s.occupied)


def tag_cells(
    cells: list[DemandCell],
    zones: list[GeoPolygon],
    perimeters: list[GeoPolygon],
) -> list[DemandCell]:
    """Assign zone tag/name and fire flag by centroid containment.

    Order zones take precedence over warning zones where both contain a centroid.
    """
    order_polys = [z for z in zones if z.tag == "evac_order"]
    warn_polys = [z for z in zones if z.tag == "evac_warning"]
    fire = PolygonSet(perimeters)
    tagged = []
    for cell in cells:
        tag, name = ZONE_NONE, ""
        for poly in order_polys:
            if point_in_polygon(cell.centroid, poly):
                tag, name = ZONE_ORDER, poly.name
                break
        if tag == ZONE_NONE:
            for poly in warn_polys:
                if point_in_polygon(cell.centroid, poly):
                    tag, name = ZONE_WARNING, poly.name
                    break
        tagged.append(
            replace(cell, zone_tag=tag, zone_name=name, in_fire=fire.contains_point(cell.centroid))
        )
    return tagged


def filter_demand(
    cells: list[DemandCell],
    zones: list[GeoPolygon],
    perimeters: list[GeoPolygon],
    include: set[str],
    exclude_fire: bool,
) -> list[DemandCell]:
    """Tag cells by containment, keep those in an included zone, optionally
    dropping cells whose centroid sits inside a fire perimeter."""
    tagged = tag_cells(cells, zones, perimeters)
    kept = [c for c in tagged if c.zone_tag in include]
    if exclude_fire:
        kept = [c for c in kept if not c.in_fire]
    return kept


@dataclass(frozen=True)
class DemandSummary:
    total_order: float
    total_warning: float
    total: float
    total_supply: float
    gap: float


def demand_summary(cells: list[DemandCell], shelters: list[Shelter]) -> DemandSummary:
    """Population by zone tag against the open shelters' effective capacity."""
    total_order = sum(c.population for c in cells if c.zone_tag == ZONE_ORDER)
    total_warning = sum(c.population for c in cells if c.zone_tag == ZONE_WARNING)
    total = total_order + total_warning
    supply = sum(effective_capacity(s) for s in shelters if s.status == "open")
    return DemandSummary(
        total_order=total_order,
        total_warning=total_warning,
        total=total,
        total_supply=supply,
        gap=max(0.0, total - supply),
    )


def load_population_csv(path: str | Path) -> list[DemandCell]:
    """Population grid CSV: cell_id,lon,lat,population."""
    cells = []
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            cells.append(
                DemandCell(
                    id=row["cell_id"],
                    centroid=GeoPoint(float(row["lon"]), float(row["lat"])),
                    population=float(row["population"]),
                )
            )
    if not cells:
        raise InputError(f"{path}: no population cells")
    return cells


def load_shelters_csv(path: str | Path) -> list[Shelter]:
    """Shelter CSV: id,name,lon,lat,capacity,floor_area,area_unit,status,occupied."""
    shelters = []
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            capacity = row.get("capacity") or ""
            floor_area = row.get("floor_area") or ""
            shelters.append(
                Shelter(
                    id=row["id"],
                    name=row.get("name") or row["id"],
                    location=GeoPoint(float(row["lon"]), float(row["lat"])),
                    capacity=float(capacity) if capacity.strip() else None,
                    floor_area=float(floor_area) if floor_area.strip() else None,
                    area_unit=(row.get("area_unit") or "sqft").strip() or "sqft",
                    status=(row.get("status") or "open").strip(),
                    occupied=float(row.get("occupied") or 0.0),
                )
            )
    if not shelters:
        raise InputError(f"{path}: no shelters")
    return shelters

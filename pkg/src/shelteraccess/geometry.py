"""Geometry primitives shared by the whole engine.

Coordinates are WGS84 lon/lat degrees. Containment and intersection tests
treat lon/lat as a plane (deterministic, resolution-independent); anything
metric (buffers, distances to polygons) runs in a local azimuthal-equidistant
frame so buffers of a few kilometers stay sub-meter accurate at county scale.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from shapely.geometry import LineString, Point as ShapelyPoint, Polygon as ShapelyPolygon
from shapely.prepared import prep

from .errors import InputError

EARTH_RADIUS_M = 6_371_000.0


@dataclass(frozen=True)
class GeoPoint:
    lon: float
    lat: float

    def __post_init__(self):
        if not (-180.0 <= self.lon <= 180.0) or not (-90.0 <= self.lat <= 90.0):
            raise InputError(f"coordinates out of range: lon={self.lon}, lat={self.lat}")


def _ring_closed(ring: tuple[GeoPoint, ...]) -> bool:
    return len(ring) >= 4 and ring[0] == ring[-1]


def _shoelace(ring: tuple[GeoPoint, ...]) -> float:
    area = 0.0
    for a, b in zip(ring, ring[1:]):
        area += a.lon * b.lat - b.lon * a.lat
    return area / 2.0


@dataclass(frozen=True)
class GeoPolygon:
    """Polygon with an exterior ring and optional holes.

    Rings must be closed (first vertex repeated last) and the exterior must be
    simple with positive area; violations raise at construction so bad geometry
    never propagates into the pipeline.
    """

    exterior: tuple[GeoPoint, ...]
    holes: tuple[tuple[GeoPoint, ...], ...] = ()
    tag: str = ""
    name: str = ""

    def __post_init__(self):
        if not _ring_closed(self.exterior):
            raise InputError("polygon exterior ring is not closed")
        for hole in self.holes:
            if not _ring_closed(hole):
                raise InputError("polygon hole ring is not closed")
        shp = ShapelyPolygon(
            [(p.lon, p.lat) for p in self.exterior],
            [[(p.lon, p.lat) for p in hole] for hole in self.holes],
        )
        if not shp.is_valid:
            raise InputError(f"invalid polygon geometry ({self.tag or 'untagged'})")
        if abs(_shoelace(self.exterior)) <= 0.0:
            raise InputError("polygon has zero area")
        object.__setattr__(self, "_shp", shp)

    @property
    def shapely(self) -> ShapelyPolygon:
        return self._shp  # type: ignore[attr-defined]

    def bounds(self) -> tuple[float, float, float, float]:
        return self.shapely.bounds


def distance_m(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in meters (spherical earth, R = 6371 km)."""
    phi1, phi2 = math.radians(a.lat), math.radians(b.lat)
    dphi = phi2 - phi1
    dlam = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def point_in_polygon(p: GeoPoint, poly: GeoPolygon) -> bool:
    """True iff p is inside the exterior and outside every hole.

    Boundary points (exterior or hole rings) count as inside.
    """
    return poly.shapely.covers(ShapelyPoint(p.lon, p.lat))


@dataclass(frozen=True)
class LocalFrame:
    """Azimuthal-equidistant plane (meters) centered on a reference point."""

    origin: GeoPoint
    _sin0: float = field(init=False, repr=False)
    _cos0: float = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_sin0", math.sin(math.radians(self.origin.lat)))
        object.__setattr__(self, "_cos0", math.cos(math.radians(self.origin.lat)))

    @classmethod
    def centered_on(cls, points: list[GeoPoint]) -> "LocalFrame":
        if not points:
            raise InputError("cannot center a frame on zero points")
        lons = [p.lon for p in points]
        lats = [p.lat for p in points]
        return cls(GeoPoint((min(lons) + max(lons)) / 2.0, (min(lats) + max(lats)) / 2.0))

    @classmethod
    def for_polygon(cls, poly: GeoPolygon) -> "LocalFrame":
        minx, miny, maxx, maxy = poly.bounds()
        return cls(GeoPoint((minx + maxx) / 2.0, (miny + maxy) / 2.0))

    def project(self, p: GeoPoint) -> tuple[float, float]:
        phi = math.radians(p.lat)
        dlam = math.radians(p.lon - self.origin.lon)
        cos_c = self._sin0 * math.sin(phi) + self._cos0 * math.cos(phi) * math.cos(dlam)
        cos_c = max(-1.0, min(1.0, cos_c))
        c = math.acos(cos_c)
        if c < 1e-12:
            return 0.0, 0.0
        k = EARTH_RADIUS_M * c / math.sin(c)
        x = k * math.cos(phi) * math.sin(dlam)
        y = k * (self._cos0 * math.sin(phi) - self._sin0 * math.cos(phi) * math.cos(dlam))
        return x, y

    def unproject(self, x: float, y: float) -> GeoPoint:
        rho = math.hypot(x, y)
        if rho < 1e-9:
            return self.origin
        c = rho / EARTH_RADIUS_M
        sin_c, cos_c = math.sin(c), math.cos(c)
        lat = math.degrees(math.asin(cos_c * self._sin0 + (y * sin_c * self._cos0) / rho))
        lon = self.origin.lon + math.degrees(
            math.atan2(x * sin_c, rho * self._cos0 * cos_c - y * self._sin0 * sin_c)
        )
        return GeoPoint(lon, lat)

    def polygon(self, poly: GeoPolygon) -> ShapelyPolygon:
        return ShapelyPolygon(
            [self.project(p) for p in poly.exterior],
            [[self.project(p) for p in hole] for hole in poly.holes],
        )

    def linestring(self, points: tuple[GeoPoint, ...]) -> LineString:
        return LineString([self.project(p) for p in points])


def _arc_segments(dist: float) -> int:
    # inscribed-arc sag r*(1 - cos(pi/(2q))) must stay under ~1 m
    return max(16, int(math.ceil(1.2 * math.sqrt(max(dist, 1.0)))))


def buffer_polygon(poly: GeoPolygon, dist: float, frame: LocalFrame | None = None) -> GeoPolygon:
    """Outward buffer by `dist` meters; holes are absorbed by the expansion."""
    if dist < 0:
        raise InputError(f"buffer distance must be non-negative, got {dist}")
    if dist == 0:
        return poly
    frame = frame or LocalFrame.for_polygon(poly)
    buffered = frame.polygon(poly).buffer(dist, quad_segs=_arc_segments(dist))
    if buffered.geom_type == "MultiPolygon":  # pragma: no cover - outward buffers stay connected
        buffered = max(buffered.geoms, key=lambda g: g.area)
    ring = tuple(frame.unproject(x, y) for x, y in buffered.exterior.coords)
    return GeoPolygon(exterior=ring, tag=poly.tag, name=poly.name)


def polygon_distance_m(p: GeoPoint, poly: GeoPolygon, frame: LocalFrame) -> float:
    """Meters from a point to the polygon; zero for points inside or on it."""
    return frame.polygon(poly).distance(ShapelyPoint(frame.project(p)))


def polyline_intersects_polygon(points: tuple[GeoPoint, ...], poly: GeoPolygon) -> bool:
    """True iff the polyline touches the polygon (interior or boundary)."""
    line = LineString([(p.lon, p.lat) for p in points])
    return poly.shapely.intersects(line)


def _ring_from_coords(coords) -> tuple[GeoPoint, ...]:
    return tuple(GeoPoint(float(x), float(y)) for x, y in coords)


def load_polygon_layers(path: str | Path, layers: set[str] | None = None) -> list[GeoPolygon]:
    """Read polygon features from a GeoJSON FeatureCollection.

    Each feature carries `layer` (evac_order, evac_warning, fire_perimeter)
    and `name` properties; MultiPolygons are split into one polygon per part.
    Passing `layers` keeps only the named layers.
    """
    with open(path, encoding="utf-8") as f:
        collection = json.load(f)
    out: list[GeoPolygon] = []
    for feature in collection.get("features", []):
        props = feature.get("properties") or {}
        tag = str(props.get("layer", ""))
        if layers is not None and tag not in layers:
            continue
        name = str(props.get("name", ""))
        geom = feature.get("geometry") or {}
        gtype = geom.get("type")
        if gtype == "Polygon":
            parts = [geom["coordinates"]]
        elif gtype == "MultiPolygon":
            parts = geom["coordinates"]
        else:
            raise InputError(f"{path}: unsupported geometry type {gtype!r} in layer {tag!r}")
        for rings in parts:
            out.append(
                GeoPolygon(
                    exterior=_ring_from_coords(rings[0]),
                    holes=tuple(_ring_from_coords(r) for r in rings[1:]),
                    tag=tag,
                    name=name,
                )
            )
    return out


def polygon_feature(poly: GeoPolygon) -> dict:
    """GeoJSON Feature for a polygon, carrying its layer and name."""
    rings = [[[p.lon, p.lat] for p in poly.exterior]]
    rings.extend([[p.lon, p.lat] for p in hole] for hole in poly.holes)
    return {
        "type": "Feature",
        "geometry": {"type": "Polygon", "coordinates": rings},
        "properties": {"layer": poly.tag, "name": poly.name},
    }


class PolygonSet:
    """Prepared group of polygons for repeated intersection/containment tests."""

    def __init__(self, polygons: list[GeoPolygon]):
        self.polygons = list(polygons)
        self._prepared = [prep(p.shapely) for p in self.polygons]

    def __len__(self) -> int:
        return len(self.polygons)

    def contains_point(self, p: GeoPoint) -> bool:
        pt = ShapelyPoint(p.lon, p.lat)
        return any(pr.covers(pt) for pr in self._prepared)

    def intersects_polyline(self, points: tuple[GeoPoint, ...]) -> bool:
        line = LineString([(q.lon, q.lat) for q in points])
        return any(pr.intersects(line) for pr in self._prepared)

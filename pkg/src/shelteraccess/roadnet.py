"""Road graph: ingestion, speed imputation, travel times, closures,
congestion overlays, and shortest-path travel-time queries.

Edge travel times are minutes. Shortest paths are plain Dijkstra on a binary
heap; the graph is directed, with two-way rows expanded into edge pairs.
"""

from __future__ import annotations

import csv
import heapq
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from statistics import fmean

from shapely import wkt as shapely_wkt

from .errors import InputError, UnimputableError, UnsnappableError
from .geometry import GeoPoint, GeoPolygon, PolygonSet, buffer_polygon, distance_m, LocalFrame

MPH_TO_KPH = 1.609344
DEFAULT_SNAP_RADIUS_M = 5000.0


@dataclass(frozen=True)
class RoadNode:
    id: int
    location: GeoPoint


@dataclass(frozen=True)
class RoadEdge:
    edge_id: str
    u: int
    v: int
    length_m: float
    highway: str
    maxspeed_kph: float | None = None
    travel_time_min: float | None = None
    geometry: tuple[GeoPoint, ...] = ()

    def __post_init__(self):
        if not self.length_m > 0:
            raise InputError(f"edge {self.edge_id!r}: length must be positive, got {self.length_m}")


class RoadGraph:
    """Immutable directed graph; transformations return new graphs."""

    def __init__(self, nodes: dict[int, RoadNode], edges: tuple[RoadEdge, ...]):
        for e in edges:
            if e.u not in nodes or e.v not in nodes:
                raise InputError(f"edge {e.edge_id!r} references unknown node")
        self.nodes = dict(nodes)
        self.edges = tuple(edges)
        adj: dict[int, list[RoadEdge]] = {}
        for e in self.edges:
            adj.setdefault(e.u, []).append(e)
        self._adj = adj

    def out_edges(self, u: int) -> list[RoadEdge]:
        return self._adj.get(u, [])

    def with_edges(self, edges: tuple[RoadEdge, ...]) -> "RoadGraph":
        return RoadGraph(self.nodes, edges)

    def reversed(self) -> "RoadGraph":
        flipped = tuple(
            replace(e, u=e.v, v=e.u, geometry=tuple(reversed(e.geometry))) for e in self.edges
        )
        return RoadGraph(self.nodes, flipped)

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class CongestionOverlay:
    zones: tuple[GeoPolygon, ...]
    buffer_m: float = 5000.0
    speed_cap_kph: float = 10.0

    def __post_init__(self):
        if self.buffer_m < 0:
            raise InputError(f"congestion buffer must be non-negative, got {self.buffer_m}")
        if not self.speed_cap_kph > 0:
            raise InputError(f"speed cap must be positive, got {self.speed_cap_kph}")


def impute_speeds(graph: RoadGraph) -> RoadGraph:
    """Fill missing maxspeeds with the per-class mean, then the global mean."""
    by_class: dict[str, list[float]] = {}
    known: list[float] = []
    for e in graph.edges:
        if e.maxspeed_kph is not None:
            by_class.setdefault(e.highway, []).append(e.maxspeed_kph)
            known.append(e.maxspeed_kph)
    if not known:
        raise UnimputableError("no edge in the network has a known maxspeed")
    global_mean = fmean(known)
    class_mean = {hw: fmean(vals) for hw, vals in by_class.items()}
    edges = tuple(
        e if e.maxspeed_kph is not None
        else replace(e, maxspeed_kph=class_mean.get(e.highway, global_mean))
        for e in graph.edges
    )
    return graph.with_edges(edges)


def derive_times(graph: RoadGraph) -> RoadGraph:
    """Set travel_time_min = (length_m / 1000) / maxspeed_kph * 60 on every edge."""
    edges = []
    for e in graph.edges:
        if e.maxspeed_kph is None or e.maxspeed_kph <= 0:
            raise InputError(f"edge {e.edge_id!r}: speed missing or non-positive")
        edges.append(replace(e, travel_time_min=(e.length_m / 1000.0) / e.maxspeed_kph * 60.0))
    return graph.with_edges(tuple(edges))


def _edge_polyline(graph: RoadGraph, e: RoadEdge) -> tuple[GeoPoint, ...]:
    if len(e.geometry) >= 2:
        return e.geometry
    return (graph.nodes[e.u].location, graph.nodes[e.v].location)


def apply_closures(graph: RoadGraph, perimeters: list[GeoPolygon]) -> RoadGraph:
    """Drop every edge whose full geometry intersects a perimeter; nodes stay."""
    if not perimeters:
        return graph
    closed = PolygonSet(perimeters)
    kept = tuple(
        e for e in graph.edges if not closed.intersects_polyline(_edge_polyline(graph, e))
    )
    return graph.with_edges(kept)


def apply_congestion(graph: RoadGraph, overlay: CongestionOverlay) -> RoadGraph:
    """Cap speeds inside the buffered zones; travel times re-derived there."""
    if not overlay.zones:
        return graph
    frame = LocalFrame.centered_on([p for z in overlay.zones for p in z.exterior])
    buffered = PolygonSet([buffer_polygon(z, overlay.buffer_m, frame) for z in overlay.zones])
    edges = []
    for e in graph.edges:
        if (
            e.maxspeed_kph is not None
            and e.maxspeed_kph > overlay.speed_cap_kph
            and buffered.intersects_polyline(_edge_polyline(graph, e))
        ):
            capped = replace(e, maxspeed_kph=overlay.speed_cap_kph)
            if e.travel_time_min is not None:
                capped = replace(
                    capped, travel_time_min=(e.length_m / 1000.0) / overlay.speed_cap_kph * 60.0
                )
            edges.append(capped)
        else:
            edges.append(e)
    return graph.with_edges(tuple(edges))


def snap(
    p: GeoPoint,
    graph: RoadGraph,
    max_radius_m: float = DEFAULT_SNAP_RADIUS_M,
    point_id: str = "point",
) -> int:
    """Nearest node id by great-circle distance, within max_radius_m."""
    if not graph.nodes:
        raise InputError("cannot snap to an empty graph")
    best_id, best_d = -1, math.inf
    for node in graph.nodes.values():
        d = distance_m(p, node.location)
        if d < best_d:
            best_id, best_d = node.id, d
    if best_d > max_radius_m:
        raise UnsnappableError(point_id, best_d, max_radius_m)
    return best_id


def sssp_minutes(graph: RoadGraph, source: int, cutoff_min: float) -> dict[int, float]:
    """Dijkstra travel times from `source`, dropping nodes beyond the cutoff."""
    if source not in graph.nodes:
        raise InputError(f"unknown source node {source}")
    dist: dict[int, float] = {}
    heap: list[tuple[float, int]] = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in dist:
            continue
        dist[u] = d
        for e in graph.out_edges(u):
            if e.travel_time_min is None:
                raise InputError(f"edge {e.edge_id!r} has no derived travel time")
            nd = d + e.travel_time_min
            if e.v not in dist and nd <= cutoff_min:
                heapq.heappush(heap, (nd, e.v))
    return dist


def travel_matrix(
    graph: RoadGraph,
    origins: list[GeoPoint],
    destinations: list[GeoPoint],
    cutoff_min: float,
    *,
    origin_ids: list[str] | None = None,
    dest_ids: list[str] | None = None,
    snap_radius_m: float = DEFAULT_SNAP_RADIUS_M,
) -> dict[tuple[str, str], float]:
    """Sparse origin->destination travel times; pairs beyond cutoff are absent."""
    origin_ids = origin_ids or [str(i) for i in range(len(origins))]
    dest_ids = dest_ids or [str(j) for j in range(len(destinations))]
    o_nodes = [snap(p, graph, snap_radius_m, point_id=oid) for p, oid in zip(origins, origin_ids)]
    d_nodes = [snap(p, graph, snap_radius_m, point_id=did) for p, did in zip(destinations, dest_ids)]

    times_from: dict[int, dict[int, float]] = {}
    for node in set(o_nodes):
        times_from[node] = sssp_minutes(graph, node, cutoff_min)

    matrix: dict[tuple[str, str], float] = {}
    for oid, onode in zip(origin_ids, o_nodes):
        reach = times_from[onode]
        for did, dnode in zip(dest_ids, d_nodes):
            t = reach.get(dnode)
            if t is not None:
                matrix[(oid, did)] = t
    return matrix


def write_matrix_csv(matrix: dict[tuple[str, str], float], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["origin_id", "dest_id", "minutes"])
        for (oid, did) in sorted(matrix):
            writer.writerow([oid, did, repr(matrix[(oid, did)])])


def _parse_speed(raw: str) -> float | None:
    raw = raw.strip()
    if not raw:
        return None
    if raw.lower().endswith("mph"):
        return float(raw[:-3].strip()) * MPH_TO_KPH
    return float(raw)


def _parse_oneway(raw: str) -> bool:
    return raw.strip().lower() in {"yes", "true", "1"}


def _build_graph(rows: list[dict], source: str) -> RoadGraph:
    nodes: dict[int, RoadNode] = {}
    edges: list[RoadEdge] = []
    seen_ids: set[str] = set()
    for row in rows:
        edge_id = str(row["edge_id"])
        if edge_id in seen_ids:
            raise InputError(f"{source}: duplicate edge_id {edge_id!r}")
        seen_ids.add(edge_id)
        u, v = int(row["u"]), int(row["v"])
        geometry = row["geometry"]
        if len(geometry) < 2:
            raise InputError(f"{source}: edge {edge_id!r} needs a geometry with >= 2 points")
        nodes.setdefault(u, RoadNode(u, geometry[0]))
        nodes.setdefault(v, RoadNode(v, geometry[-1]))
        edge = RoadEdge(
            edge_id=edge_id,
            u=u,
            v=v,
            length_m=float(row["length_m"]),
            highway=str(row.get("highway") or "unclassified"),
            maxspeed_kph=row["maxspeed_kph"],
            geometry=geometry,
        )
        edges.append(edge)
        if not row["oneway"]:
            edges.append(
                replace(edge, edge_id=f"{edge_id}-rev", u=v, v=u, geometry=tuple(reversed(geometry)))
            )
    return RoadGraph(nodes, tuple(edges))


def load_roads_csv(path: str | Path) -> RoadGraph:
    """Edge list CSV: edge_id,u,v,length_m,highway,maxspeed_kph,oneway,wkt_geometry."""
    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            try:
                line = shapely_wkt.loads(row["wkt_geometry"])
            except Exception as exc:
                raise InputError(f"{path}: bad WKT for edge {row.get('edge_id')!r}: {exc}") from exc
            rows.append(
                {
                    "edge_id": row["edge_id"],
                    "u": row["u"],
                    "v": row["v"],
                    "length_m": row["length_m"],
                    "highway": row.get("highway", ""),
                    "maxspeed_kph": _parse_speed(row.get("maxspeed_kph") or ""),
                    "oneway": _parse_oneway(row.get("oneway") or ""),
                    "geometry": tuple(GeoPoint(x, y) for x, y in line.coords),
                }
            )
    return _build_graph(rows, str(path))


def load_roads_geojson(path: str | Path) -> RoadGraph:
    """LineString FeatureCollection with the same properties as the CSV schema."""
    with open(path, encoding="utf-8") as f:
        collection = json.load(f)
    rows = []
    for feature in collection.get("features", []):
        geom = feature.get("geometry") or {}
        if geom.get("type") != "LineString":
            raise InputError(f"{path}: road features must be LineStrings, got {geom.get('type')}")
        props = feature.get("properties") or {}
        rows.append(
            {
                "edge_id": props["edge_id"],
                "u": props["u"],
                "v": props["v"],
                "length_m": props["length_m"],
                "highway": props.get("highway", ""),
                "maxspeed_kph": _parse_speed(str(props.get("maxspeed_kph") or "")),
                "oneway": _parse_oneway(str(props.get("oneway") or "")),
                "geometry": tuple(GeoPoint(x, y) for x, y in geom["coordinates"]),
            }
        )
    return _build_graph(rows, str(path))

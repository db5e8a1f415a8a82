"""Workspace: a directory of standard input files loaded once, with cached
network variants and travel matrices for interactive recomputation.

Expected contents: roads.csv, population.csv, shelters.csv, zones.geojson,
perimeters.geojson.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .catalog import DemandCell, Shelter, load_population_csv, load_shelters_csv, tag_cells
from .errors import InputError
from .geometry import GeoPolygon, load_polygon_layers
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

INPUT_FILES = ("roads.csv", "population.csv", "shelters.csv", "zones.geojson", "perimeters.geojson")


@dataclass
class Workspace:
    path: Path
    graph: RoadGraph                      # full network, speeds imputed, times derived
    cells: list[DemandCell]               # tagged, all cells
    shelters: list[Shelter]
    zones: list[GeoPolygon]
    perimeters: list[GeoPolygon]
    content_hash: str
    congestion_buffer_m: float = 5000.0
    congestion_speed_cap_kph: float = 10.0
    snap_radius_m: float = 5000.0
    _networks: dict = field(default_factory=dict, repr=False)
    _matrices: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @classmethod
    def load(cls, path: str | Path) -> "Workspace":
        path = Path(path)
        missing = [f for f in INPUT_FILES if not (path / f).exists()]
        if missing:
            raise InputError(f"workspace {path} is missing {', '.join(missing)}")
        roads_path = path / "roads.csv"
        graph = load_roads_csv(roads_path) if roads_path.suffix == ".csv" else load_roads_geojson(roads_path)
        graph = derive_times(impute_speeds(graph))
        zones = load_polygon_layers(path / "zones.geojson", layers={"evac_order", "evac_warning"})
        perimeters = load_polygon_layers(path / "perimeters.geojson", layers={"fire_perimeter"})
        cells = tag_cells(load_population_csv(path / "population.csv"), zones, perimeters)
        shelters = load_shelters_csv(path / "shelters.csv")
        digest = hashlib.sha256()
        for name in INPUT_FILES:
            digest.update(name.encode())
            digest.update((path / name).read_bytes())
        return cls(
            path=path,
            graph=graph,
            cells=cells,
            shelters=shelters,
            zones=zones,
            perimeters=perimeters,
            content_hash=digest.hexdigest(),
        )

    def network(self, closures: bool, congestion: bool) -> RoadGraph:
        key = (closures, congestion)
        with self._lock:
            if key not in self._networks:
                g = self.graph
                if closures:
                    g = apply_closures(g, self.perimeters)
                if congestion:
                    overlay = CongestionOverlay(
                        zones=tuple(self.zones),
                        buffer_m=self.congestion_buffer_m,
                        speed_cap_kph=self.congestion_speed_cap_kph,
                    )
                    g = apply_congestion(g, overlay)
                self._networks[key] = g
            return self._networks[key]

    def demand_cells(self, exclude_fire: bool) -> list[DemandCell]:
        kept = [c for c in self.cells if c.zone_tag in ("order", "warning")]
        if exclude_fire:
            kept = [c for c in kept if not c.in_fire]
        return kept

    def matrix(
        self, closures: bool, congestion: bool, exclude_fire: bool, t0_min: float
    ) -> dict[tuple[str, str], float]:
        """Travel times from demand cells to every shelter (any status)."""
        key = (closures, congestion, exclude_fire, t0_min)
        with self._lock:
            cached = self._matrices.get(key)
        if cached is not None:
            return cached
        cells = self.demand_cells(exclude_fire)
        graph = self.network(closures, congestion)
        result = travel_matrix(
            graph,
            [c.centroid for c in cells],
            [s.location for s in self.shelters],
            cutoff_min=t0_min,
            origin_ids=[c.id for c in cells],
            dest_ids=[s.id for s in self.shelters],
            snap_radius_m=self.snap_radius_m,
        )
        with self._lock:
            self._matrices[key] = result
        return result

    def open_shelters(self) -> list[Shelter]:
        return [s for s in self.shelters if s.status == "open"]

    def candidate_shelters(self) -> list[Shelter]:
        return [s for s in self.shelters if s.status == "candidate"]

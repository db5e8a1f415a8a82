#!/usr/bin/env python3
"""Generate the bundled mini-fire dataset (data/mini) and the demand-totals
fixture (data/paper_totals), then self-check the properties the test suite
relies on. Deterministic: fixed seed, stable iteration order.

Layout (meters in a local frame): a 15x15 road lattice at 1 km spacing hosts
196 population cells. Two fires burn in the north; order zones hug them and
two large warning zones cover the study area and the southern escape
corridor. Three large shelters sit far down the corridor: quick to reach on
free-flowing roads, unreachable within the time threshold once gridlock caps
speeds, which is what drives the congestion contrast between scenarios.
A north-west pocket connects to the lattice only through roads that the west
fire closes, plus a dead-end spur to a candidate lodge.
"""

from __future__ import annotations

import json
import math
import random
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from shelteraccess.geometry import GeoPoint, LocalFrame, distance_m  # noqa: E402

ORIGIN = GeoPoint(-118.5, 34.05)
FRAME = LocalFrame(ORIGIN)
RNG = random.Random(20250112)

GRID_N = 15            # lattice nodes per side
SPACING = 1000.0       # meters
LATTICE_MIN = -7000.0  # node coordinate of row/col 0

MILE = 1609.34


def node_xy(i: int, j: int) -> tuple[float, float]:
    return LATTICE_MIN + j * SPACING, LATTICE_MIN + i * SPACING


def node_id(i: int, j: int) -> int:
    return i * GRID_N + j


def unproject(x: float, y: float) -> GeoPoint:
    return FRAME.unproject(x, y)


# ---------------------------------------------------------------- road graph

POCKET_ROWS = range(11, 15)   # node rows of the isolated pocket
POCKET_COLS = range(0, 3)

# west fire closes the only lattice links into the pocket
WALL_VERTICAL = {(10, 0), (10, 1)}            # (i,j) -> (i+1,j) removed
WALL_HORIZONTAL = {(i, 2) for i in range(11, 15)}  # (i,2) -> (i,3) removed


def lattice_edges() -> list[tuple[int, int, int, int, str]]:
    """(i, j, i2, j2, kind) pairs for the lattice with mountain pruning."""
    edges = []
    for i in range(GRID_N):
        for j in range(GRID_N):
            if j + 1 < GRID_N:  # horizontal
                edges.append((i, j, i, j + 1, "h"))
            if i + 1 < GRID_N:  # vertical
                edges.append((i, j, i + 1, j, "v"))
    kept = []
    for i, j, i2, j2, kind in edges:
        if kind == "v" and (i, j) in WALL_VERTICAL:
            continue
        if kind == "h" and (i, j) in WALL_HORIZONTAL:
            continue
        # sparse mountain roads: drop most vertical links in the north,
        # keeping every third column so the lattice stays connected
        if kind == "v" and i >= 9 and not (j in POCKET_COLS and i >= 10):
            if (i + j) % 3 != 0 and (i, j) != (10, 2):
                continue
        kept.append((i, j, i2, j2, kind))
    return kept


def highway_for(i: int, j: int, i2: int, j2: int) -> tuple[str, str]:
    """(highway class, maxspeed field) for a lattice edge."""
    if i == i2 == 2:  # east-west arterial through the towns
        return "motorway", "65 mph"
    if i >= 9 or i2 >= 9:
        # mountain service roads; most rows lack posted speeds
        speed = "15 mph" if (i + j) % 4 == 0 else ""
        return "service", speed
    if (i + j) % 5 == 0:
        return "residential", ""  # imputed from the class mean
    if (i + j) % 2 == 0:
        return "residential", "40"
    return "secondary", "35 mph"


def build_roads() -> tuple[list[dict], dict[int, tuple[float, float]]]:
    nodes: dict[int, tuple[float, float]] = {}
    for i in range(GRID_N):
        for j in range(GRID_N):
            nodes[node_id(i, j)] = node_xy(i, j)

    rows = []

    def add_edge(eid, u, v, highway, speed, oneway=""):
        (x1, y1), (x2, y2) = nodes[u], nodes[v]
        p1, p2 = unproject(x1, y1), unproject(x2, y2)
        length = distance_m(p1, p2)
        rows.append(
            {
                "edge_id": eid,
                "u": u,
                "v": v,
                "length_m": f"{length:.1f}",
                "highway": highway,
                "maxspeed_kph": speed,
                "oneway": oneway,
                "wkt_geometry": f"LINESTRING ({p1.lon:.6f} {p1.lat:.6f}, {p2.lon:.6f} {p2.lat:.6f})",
            }
        )

    for i, j, i2, j2, kind in lattice_edges():
        highway, speed = highway_for(i, j, i2, j2)
        add_edge(f"{kind}-{i}-{j}", node_id(i, j), node_id(i2, j2), highway, speed)

    # southern escape corridor: fast highway to the big regional shelters
    corridor_y = [-9000, -12000, -15000, -18000, -21000, -24000, -27000, -30000, -33000, -36000]
    prev = node_id(0, 7)  # lattice node at (0, -7000)
    for k, y in enumerate(corridor_y):
        nid = 300 + k
        nodes[nid] = (0.0, y)
        add_edge(f"c-{k}", prev, nid, "motorway", "65 mph")
        prev = nid
    # shelter cluster at the corridor end
    for k, (x, y) in enumerate([(-1000.0, -36000.0), (1000.0, -36000.0)]):
        nid = 320 + k
        nodes[nid] = (x, y)
        add_edge(f"s-{k}", prev, nid, "secondary", "35 mph")

    # dead-end spur from the pocket to the lodge site
    nodes[400] = (-3900.0, 5100.0)
    add_edge("spur-lodge", node_id(12, 2), 400, "service", "15 mph")

    return rows, nodes


# ---------------------------------------------------------------- population

TOWNS = {
    "harbor": {"rows": range(0, 4), "cols": range(0, 5), "pop": (170, 370)},
    "midtown": {"rows": range(2, 6), "cols": range(6, 10), "pop": (220, 440)},
    "eastside": {"rows": range(0, 4), "cols": range(10, 14), "pop": (140, 320)},
    "foothills": {"rows": range(7, 9), "cols": range(3, 7), "pop": (90, 260)},
    "ridge": {"rows": range(7, 9), "cols": range(10, 13), "pop": (70, 220)},
}
POCKET_CELLS = {"rows": range(11, 14), "cols": range(0, 3), "pop": (15, 55)}


def cell_population(i: int, j: int) -> int:
    for town in TOWNS.values():
        if i in town["rows"] and j in town["cols"]:
            return RNG.randint(*town["pop"])
    if i in POCKET_CELLS["rows"] and j in POCKET_CELLS["cols"]:
        return RNG.randint(*POCKET_CELLS["pop"])
    if i <= 5:
        return RNG.randint(40, 110)
    return RNG.randint(8, 45)


def build_cells() -> list[dict]:
    cells = []
    for i in range(14):
        for j in range(14):
            x = LATTICE_MIN + 500.0 + j * SPACING
            y = LATTICE_MIN + 500.0 + i * SPACING
            p = unproject(x, y)
            cells.append(
                {
                    "cell_id": f"cell-{i:02d}-{j:02d}",
                    "lon": f"{p.lon:.6f}",
                    "lat": f"{p.lat:.6f}",
                    "population": cell_population(i, j),
                }
            )
    return cells


# ------------------------------------------------------------------ shelters

OPEN_SHELTERS = [
    # town shelters: small, embedded in demand clusters
    ("harbor-gym", -5000.0, -5000.0, {"capacity": 300}),
    ("midtown-rec", 500.0, -2000.0, {"capacity": 350}),
    ("eastside-church", 5000.0, -5000.0, {"capacity": 250}),
    # regional shelters down the corridor: large, far, fast to reach uncongested
    ("fairground", -1000.0, -36000.0, {"capacity": 3000}),
    ("convention-hall", 1000.0, -36000.0, {"capacity": 2500}),
    ("expo-center", 0.0, -33000.0, {"capacity": 2000}),
    # two mid-field shelters with floor areas instead of published capacity
    ("south-armory", -2000.0, -6000.0, {"floor_area": 28500, "area_unit": "sqft"}),
    ("valley-school", 3000.0, -6000.0, {"floor_area": 2400, "area_unit": "sqm", "occupied": 20}),
]

CANDIDATES = [
    ("nw-lodge", -3900.0, 5100.0, 400),
    # harbor area
    ("harbor-annex", -6000.0, -4000.0, 450),
    ("pier-hall", -4000.0, -6000.0, 380),
    ("west-high", -6000.0, -6000.0, 600),
    ("marina-club", -3000.0, -5000.0, 320),
    # midtown
    ("midtown-arena", 0.0, -3000.0, 900),
    ("city-college", 1000.0, -1000.0, 650),
    ("old-depot", -1000.0, -2000.0, 420),
    ("central-library", 2000.0, -2000.0, 380),
    ("south-pavilion", 0.0, -5000.0, 520),
    # eastside
    ("east-high", 6000.0, -4000.0, 500),
    ("east-armory", 4000.0, -4000.0, 440),
    ("lakeside-hall", 6000.0, -6000.0, 360),
    ("east-annex", 3000.0, -3000.0, 300),
    # foothills / ridge
    ("foothill-school", -2000.0, 1000.0, 350),
    ("canyon-hall", -1000.0, 2000.0, 280),
    ("trailhead-barn", -3000.0, 0.0, 260),
    ("ridge-school", 4000.0, 1000.0, 330),
    ("summit-lodge", 5000.0, 2000.0, 240),
    ("quarry-hall", 6000.0, 0.0, 270),
    # corridor venues (large)
    ("expo-south", -1000.0, -9000.0, 4000),
    ("auto-mall", 1000.0, -9000.0, 3800),
    ("speedway", -1000.0, -12000.0, 4200),
    ("distribution-hub", 1000.0, -12000.0, 3600),
    ("cargo-terminal", 0.0, -15000.0, 4500),
    ("rail-yard", 0.0, -18000.0, 3900),
    # out-of-grid fallbacks
    ("west-fairgrounds", -10000.0, -2000.0, 1500),
    ("desert-hangar", 10000.0, -2000.0, 1400),
    ("north-ranch", -9000.0, 6000.0, 900),
    ("east-ranch", 9000.0, 6000.0, 800),
]


def build_shelters() -> list[dict]:
    rows = []
    for sid, x, y, extra in OPEN_SHELTERS:
        p = unproject(x, y)
        rows.append(
            {
                "id": sid,
                "name": sid.replace("-", " ").title(),
                "lon": f"{p.lon:.6f}",
                "lat": f"{p.lat:.6f}",
                "capacity": extra.get("capacity", ""),
                "floor_area": extra.get("floor_area", ""),
                "area_unit": extra.get("area_unit", ""),
                "status": "open",
                "occupied": extra.get("occupied", 0),
            }
        )
    for sid, x, y, cap in CANDIDATES:
        p = unproject(x, y)
        rows.append(
            {
                "id": sid,
                "name": sid.replace("-", " ").title(),
                "lon": f"{p.lon:.6f}",
                "lat": f"{p.lat:.6f}",
                "capacity": cap,
                "floor_area": "",
                "area_unit": "",
                "status": "candidate",
                "occupied": 0,
            }
        )
    return rows


# ----------------------------------------------------------------- polygons

def box(x0, y0, x1, y1) -> list[list[float]]:
    pts = [(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)]
    return [[round(p.lon, 6), round(p.lat, 6)] for p in (unproject(x, y) for x, y in pts)]


def octagon(cx, cy, r) -> list[list[float]]:
    pts = []
    for k in range(8):
        a = math.pi / 8 + k * math.pi / 4
        pts.append((cx + r * math.cos(a), cy + r * math.sin(a)))
    pts.append(pts[0])
    return [[round(p.lon, 6), round(p.lat, 6)] for p in (unproject(x, y) for x, y in pts)]


def feature(ring, layer, name):
    return {
        "type": "Feature",
        "geometry": {"type": "Polygon", "coordinates": [ring]},
        "properties": {"layer": layer, "name": name},
    }


ZONES = [
    feature(box(-6000, 1500, -2000, 5000), "evac_order", "west"),
    feature(box(2000, 1800, 6000, 5200), "evac_order", "east"),
    feature(box(-16000, -30000, 0, 9000), "evac_warning", "west"),
    feature(box(0, -30000, 16000, 9000), "evac_warning", "east"),
]

PERIMETERS = [
    feature(octagon(-4000, 3000, 1300), "fire_perimeter", "west-fire"),
    feature(octagon(4000, 3500, 1100), "fire_perimeter", "east-fire"),
]


# ---------------------------------------------------------------- scenarios

SCENARIO_COMMON = """inputs:
  roads: ../roads.csv
  grid: ../population.csv
  shelters: ../shelters.csv
  zones: ../zones.geojson
  perimeters: ../perimeters.geojson
decay:
  sigma_minutes: 30
  t0_minutes: 120
congestion:
  buffer_m: 5000
  speed_cap_kph: 10
placement:
  k: 2
  ring_step_m: 1609.34
snap_radius_m: 5000
"""


def write_all(out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    roads, _ = build_roads()
    with open(out / "roads.csv", "w", encoding="utf-8") as f:
        f.write("edge_id,u,v,length_m,highway,maxspeed_kph,oneway,wkt_geometry\n")
        for r in roads:
            f.write(
                f"{r['edge_id']},{r['u']},{r['v']},{r['length_m']},{r['highway']},"
                f"{r['maxspeed_kph']},{r['oneway']},\"{r['wkt_geometry']}\"\n"
            )
    cells = build_cells()
    with open(out / "population.csv", "w", encoding="utf-8") as f:
        f.write("cell_id,lon,lat,population\n")
        for c in cells:
            f.write(f"{c['cell_id']},{c['lon']},{c['lat']},{c['population']}\n")
    shelters = build_shelters()
    with open(out / "shelters.csv", "w", encoding="utf-8") as f:
        f.write("id,name,lon,lat,capacity,floor_area,area_unit,status,occupied\n")
        for s in shelters:
            f.write(
                f"{s['id']},{s['name']},{s['lon']},{s['lat']},{s['capacity']},"
                f"{s['floor_area']},{s['area_unit']},{s['status']},{s['occupied']}\n"
            )
    (out / "zones.geojson").write_text(
        json.dumps({"type": "FeatureCollection", "features": ZONES}, indent=2) + "\n"
    )
    (out / "perimeters.geojson").write_text(
        json.dumps({"type": "FeatureCollection", "features": PERIMETERS}, indent=2) + "\n"
    )
    scen = out / "scenarios"
    scen.mkdir(exist_ok=True)
    for case in ("case1", "case2", "case3", "case4_capacity", "case4_distance"):
        (scen / f"{case}.yaml").write_text(f"case: {case}\n" + SCENARIO_COMMON)


def write_paper_totals(out: Path) -> None:
    """Eight open shelters and two zones mirroring the published aggregates:
    44,348 + 42,263 demand against 5,224 capacity."""
    out.mkdir(parents=True, exist_ok=True)
    order_pops = [11_087] * 4
    warning_pops = [10_566, 10_566, 10_566, 10_565]
    with open(out / "population.csv", "w", encoding="utf-8") as f:
        f.write("cell_id,lon,lat,population\n")
        for k, pop in enumerate(order_pops):
            p = unproject(-3000.0 + k * 1000.0, 0.0)
            f.write(f"order-{k},{p.lon:.6f},{p.lat:.6f},{pop}\n")
        for k, pop in enumerate(warning_pops):
            p = unproject(3000.0 + k * 1000.0, 0.0)
            f.write(f"warning-{k},{p.lon:.6f},{p.lat:.6f},{pop}\n")
    with open(out / "shelters.csv", "w", encoding="utf-8") as f:
        f.write("id,name,lon,lat,capacity,floor_area,area_unit,status,occupied\n")
        for k in range(8):
            p = unproject(-2000.0 + k * 500.0, -2000.0)
            f.write(f"shelter-{k},Shelter {k},{p.lon:.6f},{p.lat:.6f},653,,,open,0\n")
    zones = [
        feature(box(-4000, -800, 500, 800), "evac_order", "order-zone"),
        feature(box(2000, -800, 7000, 800), "evac_warning", "warning-zone"),
    ]
    (out / "zones.geojson").write_text(
        json.dumps({"type": "FeatureCollection", "features": zones}, indent=2) + "\n"
    )
    (out / "perimeters.geojson").write_text(
        json.dumps({"type": "FeatureCollection", "features": []}, indent=2) + "\n"
    )


# --------------------------------------------------------------- self-check

def self_check(mini: Path) -> None:
    from shelteraccess.scenario import load_config, run

    results = {}
    for case in ("case1", "case2", "case3", "case4_capacity", "case4_distance"):
        results[case] = run(load_config(mini / "scenarios" / f"{case}.yaml"))

    r2, r3 = results["case2"], results["case3"]
    s2 = {r.cell_id: r.score for r in r2.access}
    s3 = {r.cell_id: r.score for r in r3.access}
    assert set(s2) == set(s3)
    worst = max((s3[c] - s2[c] for c in s2), default=0.0)
    rising = [c for c in s2 if s3[c] > s2[c] + 1e-12]
    print(f"case2 gini={r2.gini:.4f}  case3 gini={r3.gini:.4f}  max score rise={worst:.3e}")
    print(f"cells rising under congestion: {rising}")
    assert not rising, "congestion must not raise any cell score on this fixture"
    assert r3.gini >= r2.gini, "congestion must not reduce inequality on this fixture"

    zero_cells = [c for c, v in s3.items() if v == 0.0]
    print(f"case3 zero-score cells: {len(zero_cells)} (pocket: {[c for c in zero_cells if c.endswith(('-00', '-01', '-02')) and c.startswith(('cell-11', 'cell-12', 'cell-13'))]})")
    assert any(c.startswith("cell-12-") for c in zero_cells), "pocket must be stranded in case3"

    for case in ("case4_capacity", "case4_distance"):
        r = results[case]
        assert r.placement is not None
        assert r.placement.total_capacity >= sum(c.population for c in r.cells)
        print(f"{case}: selected={len(r.placement.selected_ids)} capacity={r.placement.total_capacity:.0f} gini={r.gini:.4f}")

    r1 = results["case1"]
    print(f"case1: {len(r1.nearest_minutes)}/{len(r1.cells)} cells reach a shelter; "
          f"max {max(r1.nearest_minutes.values()):.1f} min")
    total = sum(c.population for c in results['case2'].cells)
    print(f"case2 demand={total:.0f}  case4 demand={sum(c.population for c in results['case4_capacity'].cells):.0f}")


if __name__ == "__main__":
    write_all(REPO / "data" / "mini")
    write_paper_totals(REPO / "data" / "paper_totals")
    self_check(REPO / "data" / "mini")
    print("mini dataset written")

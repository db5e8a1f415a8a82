"""Two-step floating-catchment accessibility scoring with Gaussian decay,
nearest-shelter travel times, and the seven-class score legend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .catalog import DemandCell, Shelter, effective_capacity
from .errors import ClassificationError, InputError
from .roadnet import DEFAULT_SNAP_RADIUS_M, RoadGraph, snap, sssp_minutes

CLASS_LABELS = (
    "No Access",
    "Very Poor",
    "Poor",
    "Moderate",
    "Good",
    "Very Good",
    "Excellent",
)


@dataclass(frozen=True)
class DecayParams:
    sigma_min: float = 30.0
    t0_min: float = 120.0

    def __post_init__(self):
        if not self.sigma_min > 0:
            raise InputError(f"sigma must be positive, got {self.sigma_min}")
        if not self.t0_min > 0:
            raise InputError(f"t0 must be positive, got {self.t0_min}")


@dataclass(frozen=True)
class SupplyRatio:
    shelter_id: str
    ratio: float


@dataclass(frozen=True)
class AccessResult:
    cell_id: str
    score: float
    label: str = ""


def gaussian_weight(t_min: float, params: DecayParams) -> float:
    """exp(-t^2 / (2 sigma^2)) inside the catchment, 0 beyond t0."""
    if t_min > params.t0_min:
        return 0.0
    return math.exp(-(t_min * t_min) / (2.0 * params.sigma_min * params.sigma_min))


def e2sfca(
    cells: list[DemandCell],
    shelters: list[Shelter],
    matrix: dict[tuple[str, str], float],
    params: DecayParams,
) -> tuple[list[SupplyRatio], list[AccessResult]]:
    """Step 1: capacity-to-weighted-population ratio per shelter over its
    catchment. Step 2: per-cell sum of reachable ratios, same weights.

    Shelters whose catchment holds no weighted population are skipped; cells
    with no reachable shelter score 0.
    """
    for c in cells:
        if c.population < 0:
            raise InputError(f"cell {c.id!r}: negative population")
    supply = {}
    for s in shelters:
        cap = effective_capacity(s)
        if cap < 0:
            raise InputError(f"shelter {s.id!r}: negative capacity")
        supply[s.id] = cap

    ratios: list[SupplyRatio] = []
    ratio_by_id: dict[str, float] = {}
    for s in shelters:
        denom = 0.0
        for c in cells:
            t = matrix.get((c.id, s.id))
            if t is not None and t <= params.t0_min:
                denom += c.population * gaussian_weight(t, params)
        if denom > 0.0:
            r = supply[s.id] / denom
            ratios.append(SupplyRatio(shelter_id=s.id, ratio=r))
            ratio_by_id[s.id] = r

    results: list[AccessResult] = []
    for c in cells:
        score = 0.0
        for s in shelters:
            r = ratio_by_id.get(s.id)
            if r is None:
                continue
            t = matrix.get((c.id, s.id))
            if t is not None and t <= params.t0_min:
                score += r * gaussian_weight(t, params)
        results.append(AccessResult(cell_id=c.id, score=score))
    return ratios, results


def nearest_shelter_times(
    cells: list[DemandCell],
    shelters: list[Shelter],
    graph: RoadGraph,
    snap_radius_m: float = DEFAULT_SNAP_RADIUS_M,
) -> dict[str, float]:
    """Minutes from each cell to its closest open shelter; unreachable cells
    are absent from the map."""
    open_shelters = [s for s in shelters if s.status == "open"]
    if not open_shelters:
        return {}
    rev = graph.reversed()
    shelter_nodes = {
        snap(s.location, rev, snap_radius_m, point_id=s.id) for s in open_shelters
    }
    reach = [sssp_minutes(rev, node, math.inf) for node in sorted(shelter_nodes)]
    nearest: dict[str, float] = {}
    for c in cells:
        cnode = snap(c.centroid, graph, snap_radius_m, point_id=c.id)
        best = math.inf
        for dist in reach:
            t = dist.get(cnode)
            if t is not None and t < best:
                best = t
        if best < math.inf:
            nearest[c.id] = best
    return nearest


@dataclass(frozen=True)
class ClassificationScheme:
    """Six equal-width bins over (0, ref_max], plus the zero class."""

    ref_max: float

    def __post_init__(self):
        if not self.ref_max > 0:
            raise ClassificationError(f"reference maximum must be positive, got {self.ref_max}")

    def breakpoints(self) -> list[float]:
        width = self.ref_max / 6.0
        return [width * i for i in range(7)]

    def label(self, score: float) -> str:
        if score == 0.0:
            return CLASS_LABELS[0]
        width = self.ref_max / 6.0
        k = math.ceil(score / width)
        return CLASS_LABELS[min(max(k, 1), 6)]


def classify(
    results: list[AccessResult],
    scheme: ClassificationScheme | None = None,
) -> tuple[list[AccessResult], ClassificationScheme]:
    """Label scores; a scheme from a reference scenario keeps legends shared."""
    if scheme is None:
        ref_max = max((r.score for r in results), default=0.0)
        if ref_max <= 0.0:
            raise ClassificationError("all scores are zero and no reference maximum given")
        scheme = ClassificationScheme(ref_max=ref_max)
    labeled = [replace(r, label=scheme.label(r.score)) for r in results]
    return labeled, scheme

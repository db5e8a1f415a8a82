"""Lorenz curve and Gini coefficient over population-weighted accessibility."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DegenerateDistributionError, InputError


@dataclass(frozen=True)
class LorenzPoint:
    x: float  # cumulative population share
    y: float  # cumulative accessibility share


def lorenz(cells: Sequence[tuple[float, float]]) -> list[LorenzPoint]:
    """Lorenz curve of (population, score) pairs.

    Cells are sorted ascending by score; x accumulates population shares and
    y accumulates shares of population-weighted accessibility (score * pop).
    Zero-population cells carry no equity mass and are dropped.
    """
    weighted = []
    for pop, score in cells:
        if score < 0:
            raise InputError(f"negative accessibility score {score}")
        if pop > 0:
            weighted.append((score, pop))
    if not weighted:
        raise DegenerateDistributionError("no cell with positive population")
    weighted.sort(key=lambda sp: sp[0])
    # totals accumulate in sorted order so the last point is exactly (1, 1)
    total_pop = sum(pop for _, pop in weighted)
    total_mass = sum(score * pop for score, pop in weighted)
    if total_mass <= 0:
        raise DegenerateDistributionError("every accessibility score is zero")
    points = [LorenzPoint(0.0, 0.0)]
    cum_pop = 0.0
    cum_mass = 0.0
    for score, pop in weighted:
        cum_pop += pop
        cum_mass += score * pop
        points.append(LorenzPoint(cum_pop / total_pop, cum_mass / total_mass))
    return points


def gini(cells: Sequence[tuple[float, float]]) -> float:
    """Trapezoid Gini over the Lorenz curve, clamped to [0, 1)."""
    pts = lorenz(cells)
    acc = 0.0
    for a, b in zip(pts, pts[1:]):
        acc += (b.x - a.x) * (b.y + a.y)
    g = 1.0 - acc
    return min(max(g, 0.0), 0.9999999999999999)


def equity_report(cells: Sequence[tuple[float, float]]) -> dict:
    """JSON-ready report: {"gini": g, "lorenz": [[x, y], ...]}."""
    pts = lorenz(cells)
    return {"gini": gini(cells), "lorenz": [[p.x, p.y] for p in pts]}

"""Independent brute-force oracles the test suite checks the engine against.

These deliberately share no code with the package: ray casting for
containment, crossing tests for segment/polygon intersection, Floyd-Warshall
for shortest paths, and a direct double-loop for catchment scoring.
"""

from __future__ import annotations

import math

import numpy as np


def ray_cast(x: float, y: float, ring: list[tuple[float, float]]) -> bool:
    """Crossing-number containment; boundary behavior undefined."""
    inside = False
    for (x1, y1), (x2, y2) in zip(ring, ring[1:]):
        if (y1 > y) != (y2 > y):
            x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x_cross > x:
                inside = not inside
    return inside


def point_in_polygon_oracle(
    x: float, y: float, exterior: list[tuple[float, float]], holes: list[list[tuple[float, float]]] = ()
) -> bool:
    if not ray_cast(x, y, exterior):
        return False
    return not any(ray_cast(x, y, hole) for hole in holes)


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def segments_cross(a, b, c, d) -> bool:
    d1, d2 = _orient(c, d, a), _orient(c, d, b)
    d3, d4 = _orient(a, b, c), _orient(a, b, d)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


def segment_intersects_polygon(p1, p2, exterior) -> bool:
    """Proper crossings or an endpoint inside; tangent touches are not needed
    by the tests (random fixtures avoid degeneracy)."""
    for a, b in zip(exterior, exterior[1:]):
        if segments_cross(p1, p2, a, b):
            return True
    return point_in_polygon_oracle(*p1, exterior) or point_in_polygon_oracle(*p2, exterior)


def floyd_warshall(n: int, edges: list[tuple[int, int, float]]) -> np.ndarray:
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    for u, v, w in edges:
        if w < dist[u, v]:
            dist[u, v] = w
    for k in range(n):
        dist = np.minimum(dist, dist[:, k, None] + dist[None, k, :])
    return dist


def e2sfca_double_loop(
    pops: dict[str, float],
    caps: dict[str, float],
    times: dict[tuple[str, str], float],
    sigma: float,
    t0: float,
) -> tuple[dict[str, float], dict[str, float]]:
    """Direct evaluation of both steps, no shared code with the engine."""

    def w(t: float) -> float:
        return math.exp(-(t**2) / (2.0 * sigma**2))

    ratios: dict[str, float] = {}
    for j, supply in caps.items():
        denominator = 0.0
        for i, population in pops.items():
            t = times.get((i, j))
            if t is not None and t <= t0:
                denominator += population * w(t)
        if denominator > 0:
            ratios[j] = supply / denominator

    scores: dict[str, float] = {}
    for i in pops:
        total = 0.0
        for j, ratio in ratios.items():
            t = times.get((i, j))
            if t is not None and t <= t0:
                total += ratio * w(t)
        scores[i] = total
    return ratios, scores

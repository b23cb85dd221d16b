"""Planar geometry kernel: convex hulls, areas, centroids, rigid motions
and convex polygon overlap.

Polygons are counter-clockwise with no repeated closing vertex. Angles are
in degrees throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

__all__ = [
    "EPS",
    "DEGENERATE_AREA",
    "Polygon",
    "Transform2D",
    "convex_hull",
    "polygon_area",
    "polygon_centroid",
    "rotate_points",
    "translate_points",
    "convex_intersection_area",
    "union_area",
    "signed_distance",
]

EPS = 1e-9
DEGENERATE_AREA = 1e-9

Point = Tuple[float, float]


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class Polygon:
    vertices: Tuple[Point, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "vertices", tuple((float(x), float(y)) for x, y in self.vertices)
        )

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def degenerate(self) -> bool:
        return len(self.vertices) < 3 or polygon_area(self) < DEGENERATE_AREA

    def as_array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float).reshape(-1, 2)

    def is_convex(self, tol: float = EPS) -> bool:
        v = self.vertices
        n = len(v)
        if n < 3:
            return True
        return all(_cross(v[i], v[(i + 1) % n], v[(i + 2) % n]) >= -tol for i in range(n))


@dataclass(frozen=True)
class Transform2D:
    """Rotation about ``pivot`` followed by a translation."""

    rotation_deg: float = 0.0
    pivot: Point = (0.0, 0.0)
    translation: Point = (0.0, 0.0)

    def apply(self, points) -> np.ndarray:
        rotated = rotate_points(points, self.pivot, self.rotation_deg)
        return translate_points(rotated, *self.translation)

    def inverse(self) -> "Transform2D":
        # undo translation, then rotate back about the shifted pivot
        dx, dy = self.translation
        new_pivot = (self.pivot[0] + dx, self.pivot[1] + dy)
        return Transform2D(-self.rotation_deg, new_pivot, (-dx, -dy))


def convex_hull(points) -> Polygon:
    """Andrew's monotone chain.

    Collinear boundary points are dropped. Fewer than three distinct,
    non-collinear points give a degenerate polygon (a point or a segment).
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("convex hull of an empty point set")
    uniq = sorted(set(map(tuple, pts.tolist())))
    if len(uniq) <= 2:
        return Polygon(tuple(uniq))

    lower: list = []
    for p in uniq:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(uniq):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        # all collinear: keep the extreme pair
        return Polygon((uniq[0], uniq[-1]))
    return Polygon(tuple(hull))


def _shoelace(v: Sequence[Point]) -> float:
    n = len(v)
    s = 0.0
    for i in range(n):
        x0, y0 = v[i]
        x1, y1 = v[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def polygon_area(p: Polygon) -> float:
    """Signed shoelace area (positive for CCW); 0 for fewer than 3 vertices."""
    if len(p.vertices) < 3:
        return 0.0
    return _shoelace(p.vertices)


def polygon_centroid(p: Polygon) -> Point:
    v = p.vertices
    if not v:
        raise ValueError("centroid of an empty polygon")
    n = len(v)
    area = _shoelace(v) if n >= 3 else 0.0
    if abs(area) < 1e-12:
        return (sum(x for x, _ in v) / n, sum(y for _, y in v) / n)
    cx = cy = 0.0
    for i in range(n):
        x0, y0 = v[i]
        x1, y1 = v[(i + 1) % n]
        w = x0 * y1 - x1 * y0
        cx += (x0 + x1) * w
        cy += (y0 + y1) * w
    return (cx / (6.0 * area), cy / (6.0 * area))


def rotation_matrix(deg: float) -> np.ndarray:
    rad = math.radians(deg)
    c, s = math.cos(rad), math.sin(rad)
    return np.array([[c, -s], [s, c]])


def rotate_points(points, pivot, deg: float) -> np.ndarray:
    """Rotate points counter-clockwise by ``deg`` degrees about ``pivot``."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if deg == 0:
        return pts.copy()
    centre = np.asarray(pivot, dtype=float)
    return (pts - centre) @ rotation_matrix(deg).T + centre


def translate_points(points, dx: float, dy: float) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    return pts + np.array([dx, dy], dtype=float)


def _clip(subject: list, a: Point, b: Point) -> list:
    # keep the part of subject left of the directed edge a->b
    out = []
    n = len(subject)
    if n == 0:
        return out
    ax, ay = a
    ex, ey = b[0] - ax, b[1] - ay
    prev = subject[-1]
    prev_side = ex * (prev[1] - ay) - ey * (prev[0] - ax)
    for cur in subject:
        cur_side = ex * (cur[1] - ay) - ey * (cur[0] - ax)
        if cur_side >= 0:
            if prev_side < 0:
                t = prev_side / (prev_side - cur_side)
                out.append((prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])))
            out.append(cur)
        elif prev_side >= 0:
            t = prev_side / (prev_side - cur_side)
            out.append((prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])))
        prev, prev_side = cur, cur_side
    return out


def _intersection_area(a: Sequence[Point], b: Sequence[Point]) -> float:
    poly = list(a)
    n = len(b)
    for i in range(n):
        poly = _clip(poly, b[i], b[(i + 1) % n])
        if len(poly) < 3:
            return 0.0
    return max(_shoelace(poly), 0.0)


def convex_intersection_area(a: Polygon, b: Polygon) -> float:
    """Area of the intersection of two convex polygons (Sutherland-Hodgman)."""
    if a.degenerate or b.degenerate:
        return 0.0
    return _intersection_area(a.vertices, b.vertices)


def union_area(a: Polygon, b: Polygon) -> float:
    area_a = max(polygon_area(a), 0.0)
    area_b = max(polygon_area(b), 0.0)
    return area_a + area_b - convex_intersection_area(a, b)


def signed_distance(p: Polygon, point) -> float:
    """Distance from ``point`` to the boundary, positive inside.

    Exact for points inside or near a convex polygon; used for
    containment checks.
    """
    v = p.vertices
    px, py = float(point[0]), float(point[1])
    if len(v) == 1:
        return -math.hypot(px - v[0][0], py - v[0][1])
    if len(v) == 2:
        return -_segment_distance((px, py), v[0], v[1])
    best = math.inf
    for i in range(len(v)):
        a, b = v[i], v[(i + 1) % len(v)]
        length = math.hypot(b[0] - a[0], b[1] - a[1])
        best = min(best, _cross(a, b, (px, py)) / length)
    return best


def _segment_distance(p, a, b) -> float:
    ex, ey = b[0] - a[0], b[1] - a[1]
    denom = ex * ex + ey * ey
    t = 0.0 if denom == 0 else max(0.0, min(1.0, ((p[0] - a[0]) * ex + (p[1] - a[1]) * ey) / denom))
    return math.hypot(p[0] - a[0] - t * ex, p[1] - a[1] - t * ey)


def bounding_diagonal(points) -> float:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    span = pts.max(axis=0) - pts.min(axis=0)
    return float(math.hypot(span[0], span[1]))

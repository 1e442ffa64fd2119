"""2D primitives shared by every other module.

Lengths are meters. Footprint yaw is restricted to multiples of 90 degrees,
so the axis-aligned bounds of a footprint are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

YAWS = (0, 90, 180, 270)

# Float slack for interval comparisons; grid coordinates are sums of
# decimal steps and would otherwise report 1e-16 "overlaps".
EPS = 1e-9

# yaw -> unit facing vector. yaw 0 faces +y, 90 faces +x (clockwise).
FACING = {0: (0.0, 1.0), 90: (1.0, 0.0), 180: (0.0, -1.0), 270: (-1.0, 0.0)}


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")


@dataclass(frozen=True)
class Rect:
    min: Point2
    max: Point2

    def __post_init__(self):
        if not (self.min.x < self.max.x and self.min.y < self.max.y):
            raise ValueError(f"degenerate rect {self.min} .. {self.max}")

    @classmethod
    def from_bounds(cls, x0: float, y0: float, x1: float, y1: float) -> "Rect":
        return cls(Point2(x0, y0), Point2(x1, y1))

    @property
    def width(self) -> float:
        return self.max.x - self.min.x

    @property
    def depth(self) -> float:
        return self.max.y - self.min.y

    @property
    def area(self) -> float:
        return self.width * self.depth

    @property
    def center(self) -> Point2:
        return Point2((self.min.x + self.max.x) / 2, (self.min.y + self.max.y) / 2)

    def bounds(self) -> tuple[float, float, float, float]:
        return self.min.x, self.min.y, self.max.x, self.max.y


@dataclass(frozen=True)
class Footprint:
    """Object footprint: center, local extents and a 90-degree yaw.

    ``width`` runs along the local x axis, ``depth`` along local y; the
    object's front is local +y.
    """

    center: Point2
    width: float
    depth: float
    yaw: int = 0

    def __post_init__(self):
        if not (self.width > 0 and self.depth > 0):
            raise ValueError("footprint extents must be positive")
        if self.yaw not in YAWS:
            raise ValueError(f"yaw must be one of {YAWS}, got {self.yaw}")

    @property
    def half_extents(self) -> tuple[float, float]:
        """World-axis half extents (hx, hy)."""
        if self.yaw in (90, 270):
            return self.depth / 2, self.width / 2
        return self.width / 2, self.depth / 2

    @property
    def facing(self) -> tuple[float, float]:
        return FACING[self.yaw]


def footprint_aabb(f: Footprint) -> Rect:
    hx, hy = f.half_extents
    c = f.center
    return Rect.from_bounds(c.x - hx, c.y - hy, c.x + hx, c.y + hy)


def rects_overlap(a: Rect, b: Rect) -> bool:
    """True iff the interiors intersect. Touching edges do not overlap."""
    return (
        a.min.x < b.max.x - EPS
        and b.min.x < a.max.x - EPS
        and a.min.y < b.max.y - EPS
        and b.min.y < a.max.y - EPS
    )


def rect_contains(outer: Rect, inner: Rect) -> bool:
    """Closed containment; flush to the boundary counts as inside."""
    return (
        inner.min.x >= outer.min.x - EPS
        and inner.min.y >= outer.min.y - EPS
        and inner.max.x <= outer.max.x + EPS
        and inner.max.y <= outer.max.y + EPS
    )


def axis_gaps(a: Rect, b: Rect) -> tuple[float, float]:
    """Per-axis separation between two rects, clipped at zero."""
    dx = max(0.0, b.min.x - a.max.x, a.min.x - b.max.x)
    dy = max(0.0, b.min.y - a.max.y, a.min.y - b.max.y)
    return dx, dy


def gap_distance(a: Rect, b: Rect) -> float:
    """Minimum Euclidean distance between two closed rects (0 if they meet)."""
    dx, dy = axis_gaps(a, b)
    return math.hypot(dx, dy)


def wall_gap(box: Rect, room: Rect) -> float:
    """Distance from a box to the nearest wall of the room it sits in."""
    return min(
        box.min.x - room.min.x,
        room.max.x - box.max.x,
        box.min.y - room.min.y,
        room.max.y - box.max.y,
    )


def interval_overlap(a0: float, a1: float, b0: float, b1: float) -> float:
    """Length of the intersection of [a0, a1] and [b0, b1] (0 if disjoint)."""
    return max(0.0, min(a1, b1) - max(a0, b0))


def grid_positions(lo: float, hi: float, half: float, step: float) -> list[float]:
    """Candidate center coordinates for an extent of ``2 * half`` in [lo, hi].

    The set is the absolute lattice ``lo + k * step`` restricted to centers
    that keep the extent inside, plus both flush positions. Flush positions
    let wall-hugging placements exist for any object size; the shared
    lattice keeps centers of different objects alignable.
    """
    first, last = lo + half, hi - half
    if last < first - EPS:
        return []
    if last < first:
        last = first
    out = {round(first, 9), round(last, 9)}
    k = math.ceil((first - lo) / step - EPS)
    while True:
        v = lo + k * step
        if v > last + EPS:
            break
        out.add(round(v, 9))
        k += 1
    return sorted(out)


def union_bounds(rects: Iterable[Rect]) -> Rect | None:
    rects = list(rects)
    if not rects:
        return None
    return Rect.from_bounds(
        min(r.min.x for r in rects),
        min(r.min.y for r in rects),
        max(r.max.x for r in rects),
        max(r.max.y for r in rects),
    )

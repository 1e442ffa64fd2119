"""Multi-room floor plans: rooms, validation, shared and exterior walls.

Rooms are axis-aligned rectangles given by four corner vertices, wall
thickness is zero, and a plan carries a single wall height. The
pipe-delimited line format used by the floor-plan prompt is parsed and
serialized here so that it round-trips byte for byte.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from itertools import combinations

import networkx as nx

from .errors import BadVertexCount, MalformedLine
from .geometry import EPS, Point2, Rect, interval_overlap

MIN_SIDE_M = 3.0
MAX_SIDE_M = 8.0
MIN_AREA_M2 = 9.0
MAX_AREA_M2 = 48.0
# shortest shared wall that still counts as a connection: one single door
MIN_CONNECTION_M = 1.0

DIRECTIONS = ("north", "south", "east", "west")


@lru_cache(maxsize=None)
def material_catalog() -> tuple[str, ...]:
    text = resources.files("roomgen.data").joinpath("materials.txt").read_text()
    return tuple(line.strip() for line in text.splitlines() if line.strip())


@lru_cache(maxsize=None)
def color_catalog() -> tuple[str, ...]:
    text = resources.files("roomgen.data").joinpath("colors.txt").read_text()
    return tuple(line.strip() for line in text.splitlines() if line.strip())


@dataclass(frozen=True)
class MaterialSpec:
    material_name: str
    color_name: str

    def is_known(self) -> bool:
        return (
            self.material_name in material_catalog()
            and self.color_name in color_catalog()
        )


@dataclass(frozen=True)
class Room:
    name: str
    vertices: tuple[Point2, ...]
    floor_text: str = ""
    wall_text: str = ""
    room_type: str = ""
    floor: MaterialSpec | None = None
    wall: MaterialSpec | None = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        if not self.room_type:
            object.__setattr__(self, "room_type", self.name)

    def is_rectangle(self) -> bool:
        v = self.vertices
        if len(v) != 4:
            return False
        xs = sorted({round(p.x, 9) for p in v})
        ys = sorted({round(p.y, 9) for p in v})
        if len(xs) != 2 or len(ys) != 2:
            return False
        corners = {(round(p.x, 9), round(p.y, 9)) for p in v}
        if corners != {(x, y) for x in xs for y in ys}:
            return False
        # consecutive vertices must share a coordinate (no bow-tie ordering)
        for a, b in zip(v, v[1:] + v[:1]):
            if abs(a.x - b.x) > EPS and abs(a.y - b.y) > EPS:
                return False
        return True

    @property
    def rect(self) -> Rect:
        xs = [p.x for p in self.vertices]
        ys = [p.y for p in self.vertices]
        return Rect.from_bounds(min(xs), min(ys), max(xs), max(ys))


@dataclass(frozen=True)
class FloorPlan:
    rooms: tuple[Room, ...]
    wall_height: float = 3.0

    def __post_init__(self):
        object.__setattr__(self, "rooms", tuple(self.rooms))

    def room(self, name: str) -> Room:
        for r in self.rooms:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def names(self) -> list[str]:
        return [r.name for r in self.rooms]


@dataclass(frozen=True)
class WallSegment:
    room_name: str
    direction: str
    start: Point2
    end: Point2
    shared_with: str | None = None

    @property
    def length(self) -> float:
        return abs(self.end.x - self.start.x) + abs(self.end.y - self.start.y)

    @property
    def vertical(self) -> bool:
        return self.direction in ("east", "west")

    @property
    def line(self) -> float:
        """Fixed coordinate of the wall line (x for east/west, y otherwise)."""
        return self.start.x if self.vertical else self.start.y

    @property
    def span(self) -> tuple[float, float]:
        """Varying coordinate range covered by the segment."""
        if self.vertical:
            return self.start.y, self.end.y
        return self.start.x, self.end.x

    def key(self) -> tuple:
        return (self.room_name, self.direction, self.span, self.shared_with or "")


@dataclass(frozen=True)
class Finding:
    severity: str  # "error" | "warning"
    code: str
    message: str


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "error"]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def codes(self) -> set[str]:
        return {f.code for f in self.findings}


def _side_edges(rect: Rect) -> dict[str, tuple[float, float, float]]:
    """direction -> (line coordinate, span start, span end)."""
    x0, y0, x1, y1 = rect.bounds()
    return {
        "north": (y1, x0, x1),
        "south": (y0, x0, x1),
        "east": (x1, y0, y1),
        "west": (x0, y0, y1),
    }


_OPPOSITE = {"north": "south", "south": "north", "east": "west", "west": "east"}


def _segment(room: str, direction: str, line: float, s0: float, s1: float,
             shared_with: str | None = None) -> WallSegment:
    if direction in ("east", "west"):
        return WallSegment(room, direction, Point2(line, s0), Point2(line, s1), shared_with)
    return WallSegment(room, direction, Point2(s0, line), Point2(s1, line), shared_with)


def _rect_rooms(plan: FloorPlan) -> list[Room]:
    return [r for r in plan.rooms if r.is_rectangle()]


def _shared_pair(a: Room, b: Room) -> list[WallSegment]:
    out = []
    ea, eb = _side_edges(a.rect), _side_edges(b.rect)
    for direction in ("north", "south", "east", "west"):
        la, a0, a1 = ea[direction]
        lb, b0, b1 = eb[_OPPOSITE[direction]]
        if abs(la - lb) > EPS:
            continue
        lo, hi = max(a0, b0), min(a1, b1)
        if hi - lo > EPS:
            out.append(_segment(a.name, direction, la, lo, hi, b.name))
    return out


def shared_walls(plan: FloorPlan) -> list[tuple[str, str, WallSegment]]:
    """Every positive-length boundary segment shared by two rooms.

    Segments are reported from the first room's side, in plan order.
    """
    out = []
    for a, b in combinations(_rect_rooms(plan), 2):
        for seg in _shared_pair(a, b):
            out.append((a.name, b.name, seg))
    return out


def room_walls(plan: FloorPlan, name: str) -> list[WallSegment]:
    """All wall segments of one room: shared pieces plus exterior remainders."""
    room = plan.room(name)
    shared: dict[str, list[WallSegment]] = {d: [] for d in DIRECTIONS}
    for other in _rect_rooms(plan):
        if other.name == name:
            continue
        for seg in _shared_pair(room, other):
            shared[seg.direction].append(seg)

    out = []
    for direction, (line, s0, s1) in _side_edges(room.rect).items():
        pieces = sorted(shared[direction], key=lambda s: s.span)
        out.extend(pieces)
        cursor = s0
        for seg in pieces:
            lo, hi = seg.span
            if lo - cursor > EPS:
                out.append(_segment(name, direction, line, cursor, lo))
            cursor = max(cursor, hi)
        if s1 - cursor > EPS:
            out.append(_segment(name, direction, line, cursor, s1))
    out.sort(key=lambda s: (DIRECTIONS.index(s.direction), s.span))
    return out


def exterior_walls(plan: FloorPlan) -> list[WallSegment]:
    """Boundary segments not shared with any other room."""
    out = []
    for room in _rect_rooms(plan):
        out.extend(s for s in room_walls(plan, room.name) if s.shared_with is None)
    return out


def adjacency_graph(plan: FloorPlan, min_shared: float = MIN_CONNECTION_M) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(r.name for r in _rect_rooms(plan))
    for a, b, seg in shared_walls(plan):
        if seg.length >= min_shared - EPS:
            g.add_edge(a, b)
    return g


def validate_plan(plan: FloorPlan) -> ValidationReport:
    """Collect every finding about a plan; an empty report means valid.

    Findings are sorted so the report does not depend on room order.
    """
    found: list[Finding] = []

    def add(sev, code, msg):
        found.append(Finding(sev, code, msg))

    if not plan.rooms:
        add("error", "empty_plan", "plan has no rooms")
    if not plan.wall_height > 0:
        add("error", "bad_wall_height", f"wall height {plan.wall_height} must be positive")

    seen: set[str] = set()
    for r in plan.rooms:
        if r.name in seen:
            add("error", "duplicate_name", f"room name {r.name!r} is not unique")
        seen.add(r.name)

    rooms = []
    for r in plan.rooms:
        if not r.is_rectangle():
            add("error", "non_rectangle", f"{r.name}: vertices do not form an axis-aligned rectangle")
            continue
        rooms.append(r)
        for label, spec in (("floor", r.floor), ("wall", r.wall)):
            if spec is not None and not spec.is_known():
                add("error", "unknown_material",
                    f"{r.name}: {label} material {spec.material_name!r}/{spec.color_name!r} not in catalog")
        rect = r.rect
        for side in sorted((rect.width, rect.depth)):
            if side < MIN_SIDE_M - EPS:
                add("warning", "side_too_short", f"{r.name}: side {side:g} m < {MIN_SIDE_M:g} m")
            elif side > MAX_SIDE_M + EPS:
                add("warning", "side_too_long", f"{r.name}: side {side:g} m > {MAX_SIDE_M:g} m")
        if rect.area < MIN_AREA_M2 - EPS:
            add("warning", "area_too_small", f"{r.name}: area {rect.area:g} m2 < {MIN_AREA_M2:g} m2")
        elif rect.area > MAX_AREA_M2 + EPS:
            add("warning", "area_too_large", f"{r.name}: area {rect.area:g} m2 > {MAX_AREA_M2:g} m2")

    for a, b in combinations(rooms, 2):
        ra, rb = a.rect, b.rect
        pair = " / ".join(sorted((a.name, b.name)))
        ox = interval_overlap(ra.min.x, ra.max.x, rb.min.x, rb.max.x)
        oy = interval_overlap(ra.min.y, ra.max.y, rb.min.y, rb.max.y)
        if ox > EPS and oy > EPS:
            add("error", "overlap", f"rooms overlap: {pair}")
            a_in_b = _contains(rb, ra)
            b_in_a = _contains(ra, rb)
            if a_in_b or b_in_a:
                add("error", "containment", f"one room contains the other: {pair}")

    if len(rooms) > 1 and not nx.is_connected(adjacency_graph(plan)):
        parts = sorted(sorted(c) for c in nx.connected_components(adjacency_graph(plan)))
        add("error", "disconnected", f"rooms are not connected: {parts}")

    found.sort(key=lambda f: (f.severity, f.code, f.message))
    return ValidationReport(found)


def _contains(outer: Rect, inner: Rect) -> bool:
    return (
        inner.min.x >= outer.min.x - EPS and inner.max.x <= outer.max.x + EPS
        and inner.min.y >= outer.min.y - EPS and inner.max.y <= outer.max.y + EPS
    )


# ---------------------------------------------------------------- line format

_VERTEX = re.compile(r"\(\s*(-?\d+(?:\.\d+)?)\s*,\s*(-?\d+(?:\.\d+)?)\s*\)")


def fmt_num(v: float) -> str:
    """Shortest faithful text for a coordinate: integers lose the '.0'."""
    if float(v).is_integer():
        return str(int(v))
    return repr(float(v))


def parse_vertices(text: str) -> tuple[Point2, ...]:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ValueError(f"vertex list must be bracketed: {text!r}")
    pts = [Point2(float(x), float(y)) for x, y in _VERTEX.findall(text)]
    return tuple(pts)


def parse_room_line(line: str, lineno: int = 1) -> Room:
    """``room name | floor material | wall material | [(x1, y1), ...]``"""
    parts = [p.strip() for p in line.split("|")]
    if len(parts) != 4 or not parts[0]:
        raise MalformedLine(f"line {lineno}: expected 4 fields, got {len(parts)}", lineno=lineno)
    try:
        verts = parse_vertices(parts[3])
    except ValueError as exc:
        raise MalformedLine(f"line {lineno}: {exc}", lineno=lineno) from exc
    if len(verts) != 4:
        raise BadVertexCount(f"line {lineno}: expected 4 vertices, got {len(verts)}", lineno=lineno)
    return Room(name=parts[0], vertices=verts, floor_text=parts[1], wall_text=parts[2])


def format_room_line(room: Room) -> str:
    verts = ", ".join(f"({fmt_num(p.x)}, {fmt_num(p.y)})" for p in room.vertices)
    return f"{room.name} | {room.floor_text} | {room.wall_text} | [{verts}]"


def parse_floor_plan_text(text: str) -> list[Room]:
    rooms = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.strip():
            rooms.append(parse_room_line(line, lineno))
    return rooms


def format_floor_plan_text(plan: FloorPlan) -> str:
    return "\n".join(format_room_line(r) for r in plan.rooms) + "\n"


def rect_room(name: str, x0: float, y0: float, x1: float, y1: float, **kw) -> Room:
    """Convenience constructor listing corners in the prompt's own order."""
    verts = (Point2(x0, y0), Point2(x0, y1), Point2(x1, y1), Point2(x1, y0))
    return Room(name=name, vertices=verts, **kw)

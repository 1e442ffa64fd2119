"""Doors and windows: catalog, line formats and placement on walls."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import (
    DoorTooWide,
    InvalidSize,
    InvalidWindowSize,
    MalformedLine,
    MissingExteriorDoor,
    NoSharedWall,
    UnknownConnectionType,
    WindowDoorCollision,
    WindowOverflow,
)
from .floorplan import DIRECTIONS, FloorPlan, WallSegment, room_walls, shared_walls
from .geometry import EPS

EXTERIOR = "exterior"
CONNECTIONS = ("doorframe", "doorway", "open")
DOOR_WIDTHS_M = {"single": 1.0, "double": 2.0}
DOOR_HEIGHT_M = 2.0

WINDOW_CATALOG: dict[str, tuple[tuple[int, int], ...]] = {
    "fixed": ((92, 120), (150, 92), (150, 120), (150, 180), (240, 120), (240, 180)),
    "hung": ((87, 160), (96, 91), (120, 160), (130, 67), (130, 87), (130, 130)),
    "slider": ((91, 92), (120, 61), (120, 91), (120, 120), (150, 92), (150, 120)),
}


def window_size_valid(window_type: str, size_cm: tuple[int, int]) -> bool:
    return tuple(size_cm) in WINDOW_CATALOG.get(window_type, ())


@dataclass(frozen=True)
class DoorSpec:
    room_a: str
    room_b: str
    connection: str
    size: str | None = None
    style_query: str | None = None

    def __post_init__(self):
        if self.connection not in CONNECTIONS:
            raise UnknownConnectionType(f"unknown connection type {self.connection!r}")
        if self.connection != "open" and self.size not in DOOR_WIDTHS_M:
            raise InvalidSize(f"door size must be single or double, got {self.size!r}")

    @property
    def width(self) -> float | None:
        if self.connection == "open":
            return None
        return DOOR_WIDTHS_M[self.size]

    @property
    def exterior(self) -> bool:
        return EXTERIOR in (self.room_a, self.room_b)


@dataclass(frozen=True)
class WindowSpec:
    """One window line. Construction checks structure only, so any
    well-formed line parses; ``check_catalog`` enforces the size table and
    runs in ``place_windows`` and in the pipeline's window parser."""

    room: str
    direction: str
    window_type: str
    size_cm: tuple[int, int]
    quantity: int
    base_height_cm: float

    def __post_init__(self):
        object.__setattr__(self, "size_cm", tuple(self.size_cm))
        if self.direction not in DIRECTIONS:
            raise MalformedLine(f"unknown wall direction {self.direction!r}")
        if self.window_type not in WINDOW_CATALOG:
            raise InvalidWindowSize(f"unknown window type {self.window_type!r}",
                                    window_type=self.window_type, size=self.size_cm)
        if self.quantity < 1:
            raise MalformedLine(f"window quantity must be positive, got {self.quantity}")

    @property
    def catalog_valid(self) -> bool:
        return window_size_valid(self.window_type, self.size_cm)

    def check_catalog(self) -> "WindowSpec":
        """Raise unless (type, size) is a row of the window catalog."""
        if not self.catalog_valid:
            raise InvalidWindowSize(
                f"{self.window_type} {self.size_cm} is not in the window catalog",
                window_type=self.window_type, size=self.size_cm,
            )
        return self


@dataclass(frozen=True)
class PlacedDoor:
    spec: DoorSpec
    wall: WallSegment
    offset: float  # along the wall from its start, meters
    width: float
    height: float = DOOR_HEIGHT_M

    @property
    def is_open(self) -> bool:
        return self.spec.connection == "open"

    def interval(self) -> tuple[float, float]:
        s0 = self.wall.span[0]
        return s0 + self.offset, s0 + self.offset + self.width


@dataclass(frozen=True)
class PlacedWindow:
    spec: WindowSpec
    wall: WallSegment
    offset: float
    width: float
    height: float
    base_height: float

    def interval(self) -> tuple[float, float]:
        s0 = self.wall.span[0]
        return s0 + self.offset, s0 + self.offset + self.width


def same_wall_line(a: WallSegment, b: WallSegment) -> bool:
    return a.vertical == b.vertical and abs(a.line - b.line) <= EPS


def _disjoint(i0: float, i1: float, occupied: list[tuple[float, float]]) -> bool:
    return all(i1 <= o0 + EPS or i0 >= o1 - EPS for o0, o1 in occupied)


def _free_offset(wall: WallSegment, width: float,
                 occupied: list[tuple[float, float]]) -> float | None:
    """Offset closest to centered at which ``width`` fits between openings."""
    s0, s1 = wall.span
    length = s1 - s0
    if width > length + EPS:
        return None
    center = (length - width) / 2
    candidates = {center, 0.0, length - width}
    for o0, o1 in occupied:
        candidates.add(o1 - s0)
        candidates.add(o0 - s0 - width)
    for off in sorted(candidates, key=lambda c: (abs(c - center), c)):
        if -EPS <= off <= length - width + EPS and _disjoint(s0 + off, s0 + off + width, occupied):
            return max(0.0, min(off, length - width))
    return None


def _candidate_walls(plan: FloorPlan, door: DoorSpec) -> list[WallSegment]:
    if door.exterior:
        inside = door.room_b if door.room_a == EXTERIOR else door.room_a
        if inside not in plan.names:
            raise NoSharedWall(f"unknown room {inside!r}", room_a=door.room_a, room_b=door.room_b)
        return [w for w in room_walls(plan, inside) if w.shared_with is None]
    for name in (door.room_a, door.room_b):
        if name not in plan.names:
            raise NoSharedWall(f"unknown room {name!r}", room_a=door.room_a, room_b=door.room_b)
    out = []
    for a, b, seg in shared_walls(plan):
        if {a, b} == {door.room_a, door.room_b}:
            out.append(seg)
    return out


def place_doors(plan: FloorPlan, doors: list[DoorSpec]) -> list[PlacedDoor]:
    """Put every door on the widest eligible wall, centered where free.

    ``open`` connections remove the whole shared wall, so they take the full
    wall length at offset 0.
    """
    if not any(d.exterior for d in doors):
        raise MissingExteriorDoor("no door connects to the exterior")
    placed: list[PlacedDoor] = []
    for door in doors:
        walls = _candidate_walls(plan, door)
        if not walls:
            raise NoSharedWall(
                f"{door.room_a} and {door.room_b} share no wall",
                room_a=door.room_a, room_b=door.room_b,
            )
        walls.sort(key=lambda w: (-w.length, w.key()))
        if door.connection == "open":
            w = walls[0]
            placed.append(PlacedDoor(door, w, 0.0, w.length))
            continue
        width = door.width
        if width > walls[0].length + EPS:
            raise DoorTooWide(
                f"{door.size} door ({width:g} m) wider than longest wall ({walls[0].length:g} m)",
                wall_length=walls[0].length,
            )
        for w in walls:
            occupied = [p.interval() for p in placed if same_wall_line(p.wall, w)]
            off = _free_offset(w, width, occupied)
            if off is not None:
                placed.append(PlacedDoor(door, w, off, width))
                break
        else:
            raise DoorTooWide(
                f"no free span of {width:g} m left for {door.room_a} | {door.room_b}",
                wall_length=walls[0].length,
            )
    return placed


def _window_wall(plan: FloorPlan, spec: WindowSpec) -> WallSegment | None:
    walls = [
        w for w in room_walls(plan, spec.room)
        if w.direction == spec.direction and w.shared_with is None
    ]
    if not walls:
        return None
    return max(walls, key=lambda w: (w.length, -w.span[0]))


def place_windows(plan: FloorPlan, windows: list[WindowSpec],
                  doors: list[PlacedDoor] = ()) -> list[PlacedWindow]:
    """Space each window group evenly along the exterior part of its wall."""
    by_room: dict[str, tuple] = {}
    for spec in windows:
        spec.check_catalog()
        key = (spec.window_type, spec.size_cm)
        if by_room.setdefault(spec.room, key) != key:
            raise InvalidSize(
                f"{spec.room}: all windows in a room must share type and size",
                room=spec.room,
            )

    out: list[PlacedWindow] = []
    for spec in windows:
        if spec.room not in plan.names:
            raise WindowOverflow(f"unknown room {spec.room!r}")
        width, height = spec.size_cm[0] / 100, spec.size_cm[1] / 100
        base = spec.base_height_cm / 100
        if base + height > plan.wall_height + EPS:
            raise WindowOverflow(
                f"{spec.room}: window top {spec.base_height_cm + spec.size_cm[1]:g} cm "
                f"exceeds wall height {plan.wall_height * 100:g} cm"
            )
        wall = _window_wall(plan, spec)
        available = wall.length if wall else 0.0
        total = spec.quantity * width
        if total > available + EPS:
            raise WindowOverflow(
                f"{spec.room}: {spec.quantity} x {width:g} m = {total:g} m "
                f"exceeds {spec.direction} exterior wall ({available:g} m)"
            )
        gap = (available - total) / (spec.quantity + 1)
        door_spans = [d.interval() for d in doors if same_wall_line(d.wall, wall)]
        win_spans = [w.interval() for w in out if same_wall_line(w.wall, wall)]
        for i in range(spec.quantity):
            off = gap + i * (width + gap)
            pw = PlacedWindow(spec, wall, off, width, height, base)
            i0, i1 = pw.interval()
            if not _disjoint(i0, i1, door_spans):
                raise WindowDoorCollision(f"{spec.room}: window at {i0:g}-{i1:g} m overlaps a door")
            if not _disjoint(i0, i1, win_spans):
                raise WindowOverflow(f"{spec.room}: window at {i0:g}-{i1:g} m overlaps another window")
            out.append(pw)
    return out


# ---------------------------------------------------------------- line formats

def _na(value: str) -> str | None:
    return None if value.strip().upper() in ("N/A", "NA", "") else value.strip()


def parse_door_line(line: str, lineno: int = 1) -> DoorSpec:
    """``room 1 | room 2 | connection type | size | door style``"""
    parts = [p.strip() for p in line.split("|")]
    if len(parts) != 5:
        raise MalformedLine(f"line {lineno}: expected 5 fields, got {len(parts)}", lineno=lineno)
    a, b, conn, size, style = parts
    if conn not in CONNECTIONS:
        raise UnknownConnectionType(f"line {lineno}: unknown connection type {conn!r}", lineno=lineno)
    return DoorSpec(a, b, conn, _na(size), _na(style))


def format_door_line(d: DoorSpec) -> str:
    return " | ".join([d.room_a, d.room_b, d.connection, d.size or "N/A", d.style_query or "N/A"])


_PAIR = re.compile(r"^\(\s*(\d+)\s*,\s*(\d+)\s*\)$")


def _num(text: str) -> float:
    v = float(text)
    return int(v) if v.is_integer() else v


def parse_window_line(line: str, lineno: int = 1) -> WindowSpec:
    """``room | wall direction | window type | size | quantity | base height``"""
    parts = [p.strip() for p in line.split("|")]
    if len(parts) != 6:
        raise MalformedLine(f"line {lineno}: expected 6 fields, got {len(parts)}", lineno=lineno)
    room, direction, wtype, size, qty, base = parts
    m = _PAIR.match(size)
    if not m:
        raise MalformedLine(f"line {lineno}: bad window size {size!r}", lineno=lineno)
    try:
        quantity = int(qty)
        base_h = _num(base)
    except ValueError as exc:
        raise MalformedLine(f"line {lineno}: {exc}", lineno=lineno) from exc
    if direction not in DIRECTIONS:
        raise MalformedLine(f"line {lineno}: unknown wall direction {direction!r}", lineno=lineno)
    return WindowSpec(room, direction, wtype, (int(m[1]), int(m[2])), quantity, base_h)


def format_window_line(w: WindowSpec) -> str:
    base = w.base_height_cm
    base_txt = str(int(base)) if float(base).is_integer() else repr(float(base))
    return (
        f"{w.room} | {w.direction} | {w.window_type} | "
        f"({w.size_cm[0]}, {w.size_cm[1]}) | {w.quantity} | {base_txt}"
    )

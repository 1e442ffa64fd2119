"""Scene documents: wall, small and ceiling objects, export and SVG rendering.

Scene file schema ``roomgen.scene/1`` (JSON, keys sorted, floats with six
decimals)::

    {
      "schema": "roomgen.scene/1",
      "metadata": {"prompt": str, "seed": int, "generator": str, ...},
      "floor_plan": {"wall_height": m, "rooms": [room...]},
      "doors": [door...], "windows": [window...],
      "objects": [object...], "diagnostics": [str...]
    }

room:   name, room_type, vertices [[x, y]...], floor_text, wall_text,
        floor/wall {"material", "color"} or null
wall:   room, direction, start [x, y], end [x, y], shared_with
door:   room_a, room_b, connection, size, style_query, asset_id, wall,
        offset, width, height
window: room, direction, window_type, size_cm [w, h], quantity,
        base_height_cm, wall, offset, width, height, base_height
object: instance_id, asset_id, room, kind, position [x, y, z], yaw,
        parent, size [w, d, h]

All lengths are meters except the ``*_cm`` fields.
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass, field, replace
from xml.etree import ElementTree as ET

import numpy as np

from .errors import MalformedStructure, NoAdjacentWall, OpeningCollision
from .floorplan import FloorPlan, MaterialSpec, Room, WallSegment
from .geometry import EPS, FACING, Footprint, Point2, Rect, footprint_aabb
from .openings import DoorSpec, PlacedDoor, PlacedWindow, WindowSpec

SCHEMA = "roomgen.scene/1"
KINDS = ("floor", "wall", "small", "ceiling")
PX_PER_M = 50
MARGIN_PX = 20
EDGE_THRESHOLD = 0.3

# wall a wall object hangs on -> yaw that faces into the room
WALL_YAW = {"south": 0, "west": 90, "north": 180, "east": 270}


def q6(v: float) -> float:
    """Quantize to the export precision so that export/parse is lossless."""
    r = round(float(v), 6)
    return 0.0 if r == 0 else r


@dataclass(frozen=True)
class PlacedObject:
    instance_id: str
    asset_id: str
    room: str
    kind: str
    position: tuple[float, float, float]
    yaw: int
    size: tuple[float, float, float]  # (w, d, h) meters
    parent: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise MalformedStructure(f"unknown object kind {self.kind!r}")
        object.__setattr__(self, "position", tuple(q6(v) for v in self.position))
        object.__setattr__(self, "size", tuple(q6(v) for v in self.size))

    @property
    def footprint(self) -> Footprint:
        return Footprint(Point2(self.position[0], self.position[1]), self.size[0], self.size[1], self.yaw)

    @property
    def aabb(self) -> Rect:
        return footprint_aabb(self.footprint)

    @property
    def top(self) -> float:
        return self.position[2] + self.size[2]


@dataclass
class SceneDocument:
    metadata: dict
    plan: FloorPlan
    doors: list[PlacedDoor] = field(default_factory=list)
    windows: list[PlacedWindow] = field(default_factory=list)
    objects: list[PlacedObject] = field(default_factory=list)
    door_assets: list[str | None] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)

    def object(self, instance_id: str) -> PlacedObject:
        for o in self.objects:
            if o.instance_id == instance_id:
                return o
        raise KeyError(instance_id)

    def room_objects(self, room: str, kind: str | None = None) -> list[PlacedObject]:
        return [o for o in self.objects if o.room == room and (kind is None or o.kind == kind)]


# ---------------------------------------------------------------- placement

def _intervals_clash(a0, a1, b0, b1) -> bool:
    return a0 < b1 - EPS and a1 > b0 + EPS


def opening_intervals(room: Room, direction: str, doors=(), windows=()) -> list[tuple[float, float]]:
    """Spans along the given wall of ``room`` taken by doors and windows."""
    rect = room.rect
    vertical = direction in ("east", "west")
    line = {"west": rect.min.x, "east": rect.max.x, "south": rect.min.y, "north": rect.max.y}[direction]
    out = []
    for op in list(doors) + list(windows):
        w = op.wall
        if w.vertical == vertical and abs(w.line - line) <= EPS:
            out.append(op.interval())
    return sorted(out)


def place_wall_object(instance_id: str, asset_id: str, size: tuple[float, float, float],
                      above: PlacedObject, height_cm: float, room: Room,
                      doors=(), windows=(), edge_threshold: float = EDGE_THRESHOLD) -> PlacedObject:
    """Hang a wall object above ``above`` on the wall right behind it.

    The object is flush with the nearest wall within ``edge_threshold`` of the
    floor object, centered over it along the wall (clamped to the wall's
    extent), with its base ``height_cm`` above the floor.
    """
    rect = room.rect
    box = above.aabb
    gaps = {
        "south": box.min.y - rect.min.y,
        "east": rect.max.x - box.max.x,
        "north": rect.max.y - box.max.y,
        "west": box.min.x - rect.min.x,
    }
    near = sorted((g, d) for d, g in gaps.items() if g <= edge_threshold + EPS)
    if not near:
        raise NoAdjacentWall(f"{above.instance_id} is not against any wall", instance_id=above.instance_id)
    direction = near[0][1]
    w, d, h = size
    if direction in ("north", "south"):
        lo, hi = rect.min.x, rect.max.x
        c = min(max(above.position[0], lo + w / 2), hi - w / 2)
        y = rect.max.y - d / 2 if direction == "north" else rect.min.y + d / 2
        pos = (c, y)
    else:
        lo, hi = rect.min.y, rect.max.y
        c = min(max(above.position[1], lo + w / 2), hi - w / 2)
        x = rect.max.x - d / 2 if direction == "east" else rect.min.x + d / 2
        pos = (x, c)
    i0, i1 = c - w / 2, c + w / 2
    for o0, o1 in opening_intervals(room, direction, doors, windows):
        if _intervals_clash(i0, i1, o0, o1):
            raise OpeningCollision(
                f"{instance_id} spans {i0:g}-{i1:g} m on the {direction} wall, "
                f"overlapping an opening at {o0:g}-{o1:g} m",
                instance_id=instance_id,
            )
    return PlacedObject(instance_id, asset_id, room.name, "wall",
                        (pos[0], pos[1], height_cm / 100), WALL_YAW[direction], (w, d, h),
                        parent=above.instance_id)


def wall_interval(o: PlacedObject) -> tuple[float, float]:
    """Span of a wall object along its wall."""
    along = o.position[0] if o.yaw in (0, 180) else o.position[1]
    return along - o.size[0] / 2, along + o.size[0] / 2


def _stable_seed(seed: int, key: str) -> list[int]:
    return [int(seed) & 0xFFFFFFFF, zlib.crc32(key.encode())]


def spawn_small_objects(parent: PlacedObject, children: list[tuple[str, str, tuple[float, float, float]]],
                        seed: int = 0) -> tuple[list[PlacedObject], list[str]]:
    """Scatter ``(instance_id, asset_id, size)`` children on the parent's top.

    The top rectangle is cut into a grid with at least one cell per child;
    child i goes to cell i at a jittered position that keeps it inside the
    cell, so children never overlap. A child that does not fit its cell is
    dropped with a diagnostic.
    """
    if not children:
        return [], []
    top = parent.aabb
    W, D = top.width, top.depth
    n = len(children)
    cols = min(n, max(1, round(math.sqrt(n * W / D)))) if D > 0 else n
    rows = math.ceil(n / cols)
    cw, cd = W / cols, D / rows
    rng = np.random.default_rng(_stable_seed(seed, parent.instance_id))
    placed, diags = [], []
    for i, (iid, aid, (w, d, h)) in enumerate(children):
        turned = parent.yaw in (90, 270)
        ex, ey = (d, w) if turned else (w, d)
        r, c = divmod(i, cols)
        x0, y0 = top.min.x + c * cw, top.min.y + r * cd
        slack_x, slack_y = cw - ex, cd - ey
        jx, jy = rng.random(2)
        if slack_x < -EPS or slack_y < -EPS:
            diags.append(f"dropped_small:{iid}")
            continue
        x = x0 + ex / 2 + max(slack_x, 0.0) * jx
        y = y0 + ey / 2 + max(slack_y, 0.0) * jy
        placed.append(PlacedObject(iid, aid, parent.room, "small", (x, y, parent.top),
                                   parent.yaw, (w, d, h), parent=parent.instance_id))
    return placed, diags


def place_ceiling_object(instance_id: str, asset_id: str, size: tuple[float, float, float],
                         room: Room, wall_height: float) -> PlacedObject:
    c = room.rect.center
    return PlacedObject(instance_id, asset_id, room.name, "ceiling", (c.x, c.y, wall_height), 0, size)


def quantize_document(doc: SceneDocument) -> SceneDocument:
    """Round opening offsets to the export precision."""
    doors = [replace(d, offset=q6(d.offset), width=q6(d.width), height=q6(d.height)) for d in doc.doors]
    wins = [replace(w, offset=q6(w.offset), width=q6(w.width), height=q6(w.height),
                    base_height=q6(w.base_height)) for w in doc.windows]
    return replace(doc, doors=doors, windows=wins)


# ---------------------------------------------------------------- export

def _emit(value, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("non-finite number in scene")
        return "%.6f" % q6(value)
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            return "[" + ", ".join(_emit(v) for v in value) + "]"
        inner = ",\n".join(pad + _emit(v, indent + 1) for v in value)
        return "[\n" + inner + "\n" + "  " * indent + "]"
    if isinstance(value, dict):
        if not value:
            return "{}"
        inner = ",\n".join(
            f"{pad}{json.dumps(str(k))}: {_emit(value[k], indent + 1)}" for k in sorted(value)
        )
        return "{\n" + inner + "\n" + "  " * indent + "}"
    raise TypeError(f"cannot emit {type(value).__name__}")


def _pt(p: Point2) -> list[float]:
    return [float(p.x), float(p.y)]


def _mat(m: MaterialSpec | None):
    return None if m is None else {"material": m.material_name, "color": m.color_name}


def _wall(w: WallSegment) -> dict:
    return {"room": w.room_name, "direction": w.direction, "start": _pt(w.start),
            "end": _pt(w.end), "shared_with": w.shared_with}


def scene_to_dict(doc: SceneDocument) -> dict:
    assets = doc.door_assets or [None] * len(doc.doors)
    return {
        "schema": SCHEMA,
        "metadata": dict(doc.metadata),
        "floor_plan": {
            "wall_height": float(doc.plan.wall_height),
            "rooms": [
                {
                    "name": r.name, "room_type": r.room_type,
                    "vertices": [_pt(v) for v in r.vertices],
                    "floor_text": r.floor_text, "wall_text": r.wall_text,
                    "floor": _mat(r.floor), "wall": _mat(r.wall),
                }
                for r in doc.plan.rooms
            ],
        },
        "doors": [
            {
                "room_a": d.spec.room_a, "room_b": d.spec.room_b, "connection": d.spec.connection,
                "size": d.spec.size, "style_query": d.spec.style_query, "asset_id": a,
                "wall": _wall(d.wall), "offset": float(d.offset), "width": float(d.width),
                "height": float(d.height),
            }
            for d, a in zip(doc.doors, assets)
        ],
        "windows": [
            {
                "room": w.spec.room, "direction": w.spec.direction, "window_type": w.spec.window_type,
                "size_cm": list(w.spec.size_cm), "quantity": w.spec.quantity,
                "base_height_cm": w.spec.base_height_cm, "wall": _wall(w.wall),
                "offset": float(w.offset), "width": float(w.width), "height": float(w.height),
                "base_height": float(w.base_height),
            }
            for w in doc.windows
        ],
        "objects": [
            {
                "instance_id": o.instance_id, "asset_id": o.asset_id, "room": o.room, "kind": o.kind,
                "position": [float(v) for v in o.position], "yaw": int(o.yaw),
                "size": [float(v) for v in o.size], "parent": o.parent,
            }
            for o in doc.objects
        ],
        "diagnostics": list(doc.diagnostics),
    }


def export_scene(doc: SceneDocument) -> str:
    return _emit(scene_to_dict(doc)) + "\n"


def _p(xy) -> Point2:
    return Point2(float(xy[0]), float(xy[1]))


def _wall_from(d: dict) -> WallSegment:
    return WallSegment(d["room"], d["direction"], _p(d["start"]), _p(d["end"]), d["shared_with"])


def _mat_from(d):
    return None if d is None else MaterialSpec(d["material"], d["color"])


def _num(v):
    return int(v) if isinstance(v, int) else float(v)


def parse_scene(text: str) -> SceneDocument:
    try:
        d = json.loads(text)
        if d.get("schema") != SCHEMA:
            raise MalformedStructure(f"unsupported scene schema {d.get('schema')!r}")
        fp = d["floor_plan"]
        plan = FloorPlan(
            tuple(
                Room(r["name"], tuple(_p(v) for v in r["vertices"]), r["floor_text"], r["wall_text"],
                     r["room_type"], _mat_from(r["floor"]), _mat_from(r["wall"]))
                for r in fp["rooms"]
            ),
            float(fp["wall_height"]),
        )
        doors, door_assets = [], []
        for x in d["doors"]:
            spec = DoorSpec(x["room_a"], x["room_b"], x["connection"], x["size"], x["style_query"])
            doors.append(PlacedDoor(spec, _wall_from(x["wall"]), float(x["offset"]),
                                    float(x["width"]), float(x["height"])))
            door_assets.append(x["asset_id"])
        windows = []
        for x in d["windows"]:
            spec = WindowSpec(x["room"], x["direction"], x["window_type"], tuple(x["size_cm"]),
                              int(x["quantity"]), _num(x["base_height_cm"]))
            windows.append(PlacedWindow(spec, _wall_from(x["wall"]), float(x["offset"]),
                                        float(x["width"]), float(x["height"]), float(x["base_height"])))
        objects = [
            PlacedObject(o["instance_id"], o["asset_id"], o["room"], o["kind"],
                         tuple(float(v) for v in o["position"]), int(o["yaw"]),
                         tuple(float(v) for v in o["size"]), o["parent"])
            for o in d["objects"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedStructure(f"bad scene file: {exc}") from exc
    return SceneDocument(d["metadata"], plan, doors, windows, objects, door_assets, list(d["diagnostics"]))


# ---------------------------------------------------------------- svg

_FILL = {"floor": "#c9d8e8", "wall": "#e8c9c9", "small": "#d8e8c9", "ceiling": "none"}


def render_svg(doc: SceneDocument) -> str:
    """Top-down view at 50 px per meter, y pointing up."""
    rooms = doc.plan.rooms
    if rooms:
        xs = [v.x for r in rooms for v in r.vertices]
        ys = [v.y for r in rooms for v in r.vertices]
        x0, y0, x1, y1 = min(xs), min(ys), max(xs), max(ys)
    else:
        x0 = y0 = x1 = y1 = 0.0
    width = (x1 - x0) * PX_PER_M + 2 * MARGIN_PX
    height = (y1 - y0) * PX_PER_M + 2 * MARGIN_PX

    def px(x):
        return MARGIN_PX + (x - x0) * PX_PER_M

    def py(y):
        return MARGIN_PX + (y1 - y) * PX_PER_M

    def f(v):
        return "%.2f" % v

    svg = ET.Element("svg", {
        "xmlns": "http://www.w3.org/2000/svg",
        "width": f(width), "height": f(height),
        "viewBox": f"0 0 {f(width)} {f(height)}",
    })
    ET.SubElement(svg, "rect", {"class": "canvas", "x": "0", "y": "0", "width": f(width),
                                "height": f(height), "fill": "white"})
    for r in rooms:
        b = r.rect
        ET.SubElement(svg, "rect", {
            "class": "room", "x": f(px(b.min.x)), "y": f(py(b.max.y)),
            "width": f(b.width * PX_PER_M), "height": f(b.depth * PX_PER_M),
            "fill": "none", "stroke": "black", "stroke-width": "2",
        })
        t = ET.SubElement(svg, "text", {"class": "room-label", "x": f(px(b.center.x)),
                                        "y": f(py(b.max.y) + 14), "text-anchor": "middle",
                                        "font-size": "12"})
        t.text = r.name

    def opening(cls, wall, i0, i1, color):
        if wall.vertical:
            a = (px(wall.line), py(i0))
            b = (px(wall.line), py(i1))
        else:
            a = (px(i0), py(wall.line))
            b = (px(i1), py(wall.line))
        ET.SubElement(svg, "line", {"class": cls, "x1": f(a[0]), "y1": f(a[1]), "x2": f(b[0]),
                                    "y2": f(b[1]), "stroke": color, "stroke-width": "5"})

    for d in doc.doors:
        opening("door", d.wall, *d.interval(), "#8b5a2b")
    for w in doc.windows:
        opening("window", w.wall, *w.interval(), "#3a8fd8")

    order = {k: i for i, k in enumerate(KINDS)}
    for o in sorted(doc.objects, key=lambda o: (order[o.kind], o.room, o.instance_id)):
        b = o.aabb
        g = ET.SubElement(svg, "g", {"class": f"object {o.kind}", "id": o.instance_id})
        ET.SubElement(g, "rect", {
            "x": f(px(b.min.x)), "y": f(py(b.max.y)), "width": f(b.width * PX_PER_M),
            "height": f(b.depth * PX_PER_M), "fill": _FILL[o.kind], "stroke": "#333",
            "stroke-width": "1",
        })
        cx, cy = o.position[0], o.position[1]
        fx, fy = FACING[o.yaw]
        reach = min(b.width, b.depth) / 2
        ET.SubElement(g, "line", {
            "class": "facing", "x1": f(px(cx)), "y1": f(py(cy)),
            "x2": f(px(cx + fx * reach)), "y2": f(py(cy + fy * reach)),
            "stroke": "#c00", "stroke-width": "1.5",
        })
        label = ET.SubElement(g, "text", {"class": "label", "x": f(px(cx)), "y": f(py(cy) - 3),
                                          "text-anchor": "middle", "font-size": "9"})
        label.text = o.instance_id
    ET.indent(svg)
    return ET.tostring(svg, encoding="unicode") + "\n"

"""Floor-object layout: DFS constraint solver and baseline strategies.

The DFS solver places objects one at a time in scene-graph order. Each
object's candidate placements (grid positions x 4 yaws) are filtered by the
hard constraints (inside the room, no collision with anything already
placed) and tried best-score first. Complete and partial layouts are
collected until the candidate budget runs out; the best one wins.

Layout objective: satisfied constraints minus ``DROP_PENALTY`` per object
that could not be placed, so any complete layout beats a partial one with
the same or lower raw score.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from .constraints import (
    Candidates,
    ConstraintSpec,
    PredicateParams,
    SceneGraph,
    batch_eval,
    parse_scene_graph,
    score_placement,
)
from .errors import EmptyRoom, MalformedLine
from .geometry import (
    EPS,
    YAWS,
    Footprint,
    Point2,
    Rect,
    footprint_aabb,
    grid_positions,
    rect_contains,
    rects_overlap,
)

logger = logging.getLogger(__name__)

DROP_PENALTY = 10
DEFAULT_GRID_STEP = 0.25
DEFAULT_MAX_CANDIDATES = 10_000
# search-tree node cap (about 30 s on a laptop); bounds adversarial
# instances deterministically, unlike the wall clock
DEFAULT_MAX_NODES = 150_000
RANDOM_ATTEMPTS = 1000


@dataclass(frozen=True)
class ObjectDims:
    id: str
    width: float
    depth: float

    @property
    def area(self) -> float:
        return self.width * self.depth


@dataclass(frozen=True)
class PlacementProblem:
    room: Rect
    objects: tuple[ObjectDims, ...]
    graph: SceneGraph
    params: PredicateParams = PredicateParams()
    grid_step: float = DEFAULT_GRID_STEP
    max_candidates: int | None = DEFAULT_MAX_CANDIDATES
    wall_clock_seconds: float | None = None
    max_nodes: int | None = DEFAULT_MAX_NODES

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        if not self.grid_step > 0:
            raise ValueError("grid_step must be positive")
        ids = [o.id for o in self.objects]
        if sorted(ids) != sorted(self.graph.ids):
            raise ValueError(f"object ids {sorted(ids)} do not match graph ids {sorted(self.graph.ids)}")

    def dims(self, object_id: str) -> ObjectDims:
        for o in self.objects:
            if o.id == object_id:
                return o
        raise KeyError(object_id)


@dataclass
class Layout:
    placements: dict[str, Footprint]
    score: int = 0
    total: int = 0
    complete: bool = True
    dropped: tuple[str, ...] = ()
    diagnostics: tuple[str, ...] = ()
    milp_objective: float | None = None

    @property
    def objective(self) -> int:
        return self.score - DROP_PENALTY * len(self.dropped)

    @property
    def satisfaction(self) -> float:
        return self.score / self.total if self.total else 1.0


# ---------------------------------------------------------------- helpers

def hard_violations(room: Rect, placements: dict[str, Footprint]
                    ) -> tuple[list[str], list[tuple[str, str]]]:
    """(ids outside the room, colliding id pairs)."""
    boxes = {k: footprint_aabb(v) for k, v in placements.items()}
    oob = sorted(k for k, b in boxes.items() if not rect_contains(room, b))
    pairs = sorted(
        tuple(sorted((a, b)))
        for a, b in combinations(sorted(boxes), 2)
        if rects_overlap(boxes[a], boxes[b])
    )
    return oob, pairs


def score_layout(graph: SceneGraph, placements: dict[str, Footprint], room: Rect,
                 params: PredicateParams = PredicateParams()) -> tuple[int, int]:
    """(satisfied constraints over placed objects, total constraints in graph)."""
    score = 0
    for spec in graph.specs:
        if spec.object_id in placements:
            score += score_placement(spec, placements[spec.object_id], placements, room, params)
    return score, graph.total_constraints()


def _finish(p: PlacementProblem, placements: dict[str, Footprint],
            diagnostics: list[str]) -> Layout:
    score, total = score_layout(p.graph, placements, p.room, p.params)
    dropped = tuple(i for i in p.graph.ids if i not in placements)
    diagnostics = diagnostics + [f"dropped:{i}" for i in dropped]
    return Layout(dict(placements), score, total, not dropped, dropped, tuple(diagnostics))


def object_candidates(room: Rect, width: float, depth: float, step: float) -> Candidates:
    """All grid placements (4 yaws) of one object that fit inside the room."""
    cx, cy, yaw = [], [], []
    for y in YAWS:
        hx, hy = (depth / 2, width / 2) if y in (90, 270) else (width / 2, depth / 2)
        xs = grid_positions(room.min.x, room.max.x, hx, step)
        ys = grid_positions(room.min.y, room.max.y, hy, step)
        for x in xs:
            for yy in ys:
                cx.append(x)
                cy.append(yy)
                yaw.append(y)
    return Candidates.build(cx, cy, yaw, width, depth)


def _depths(graph: SceneGraph) -> dict[str, int]:
    depth: dict[str, int] = {}
    for s in graph.specs:
        depth[s.object_id] = 1 + max((depth[t] for t in s.targets), default=-1)
    return depth


def placement_order(p: PlacementProblem) -> list[ConstraintSpec]:
    """Graph order; runs of equal dependency depth after the anchor go larger-first."""
    specs = list(p.graph.specs)
    if len(specs) <= 2:
        return specs
    depth = _depths(p.graph)
    out = [specs[0]]
    run: list[ConstraintSpec] = []
    for s in specs[1:]:
        if run and depth[run[-1].object_id] != depth[s.object_id]:
            out.extend(sorted(run, key=lambda r: -p.dims(r.object_id).area))
            run = []
        run.append(s)
    out.extend(sorted(run, key=lambda r: -p.dims(r.object_id).area))
    return out


def _placement_key(placements: dict[str, Footprint]) -> tuple:
    return tuple(
        (k, round(f.center.x, 9), round(f.center.y, 9), f.yaw)
        for k, f in sorted(placements.items())
    )


# ---------------------------------------------------------------- DFS solver

def solve_dfs(p: PlacementProblem, seed: int = 0) -> Layout:
    if not p.graph.specs:
        raise EmptyRoom("scene graph is empty; there is no anchor to place")
    order = placement_order(p)
    n = len(order)
    rng = np.random.default_rng(seed)
    diagnostics: list[str] = []

    cands: list[Candidates] = []
    static: list[np.ndarray] = []
    for spec in order:
        d = p.dims(spec.object_id)
        c = object_candidates(p.room, d.width, d.depth, p.grid_step)
        if len(c) == 0:
            diagnostics.append(f"object_larger_than_room:{spec.object_id}")
        cands.append(c)
        static.append(batch_eval(spec.global_, c, None, p.room, p.params).astype(np.int64)
                      if len(c) else np.zeros(0, dtype=np.int64))

    rest = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        rest[i] = rest[i + 1] + len(order[i].constraints)

    deadline = time.monotonic() + p.wall_clock_seconds if p.wall_clock_seconds else None
    best: dict = {"obj": None, "key": None, "placements": None}
    leaves = nodes = 0
    stop = False
    placed: dict[str, Footprint] = {}
    boxes: dict[str, Rect] = {}

    def record(score: int, dropped: int):
        nonlocal leaves, stop
        leaves += 1
        obj = score - DROP_PENALTY * dropped
        key = _placement_key(placed)
        if best["obj"] is None or obj > best["obj"] or (obj == best["obj"] and key < best["key"]):
            best.update(obj=obj, key=key, placements=dict(placed))
        if p.max_candidates is not None and leaves >= p.max_candidates:
            stop = True
        if deadline is not None and time.monotonic() > deadline:
            stop = True

    def recurse(i: int, score: int, dropped: int):
        nonlocal stop, nodes
        nodes += 1
        if p.max_nodes is not None and nodes >= p.max_nodes:
            stop = True  # honored once the current descent reaches a leaf
        if i == n:
            record(score, dropped)
            return
        spec, cand = order[i], cands[i]
        ok = np.ones(len(cand), dtype=bool)
        for box in boxes.values():
            ok &= ~cand.overlaps(box)
        idx = np.flatnonzero(ok)
        if len(idx) == 0:
            recurse(i + 1, score, dropped + 1)
            return
        sub = cand.take(idx)
        local = static[i][idx].copy()
        for rel in spec.relations:
            if rel.target in placed:
                local += batch_eval(rel, sub, placed[rel.target], p.room, p.params)
        perm = rng.permutation(len(idx))
        ranked = perm[np.argsort(-local[perm], kind="stable")]
        oid = spec.object_id
        for j in ranked:
            s = int(local[j])
            if best["obj"] is not None and score + s + rest[i + 1] - DROP_PENALTY * dropped <= best["obj"]:
                break
            fp = sub.footprint(int(j))
            placed[oid] = fp
            boxes[oid] = footprint_aabb(fp)
            recurse(i + 1, score + s, dropped)
            del placed[oid], boxes[oid]
            if stop:
                return
        if deadline is not None and time.monotonic() > deadline:
            stop = True

    recurse(0, 0, 0)
    logger.debug("dfs explored %d nodes, %d leaves, best objective %s", nodes, leaves, best["obj"])
    return _finish(p, best["placements"] or {}, diagnostics)


# ---------------------------------------------------------------- baselines

def solve_random(p: PlacementProblem, seed: int = 0) -> Layout:
    """Uniform rejection sampling; keeps the first collision-free draw per object."""
    rng = np.random.default_rng(seed)
    placements: dict[str, Footprint] = {}
    boxes: list[Rect] = []
    room = p.room
    for spec in p.graph.specs:
        d = p.dims(spec.object_id)
        for _ in range(RANDOM_ATTEMPTS):
            yaw = int(YAWS[rng.integers(4)])
            hx, hy = (d.depth / 2, d.width / 2) if yaw in (90, 270) else (d.width / 2, d.depth / 2)
            if 2 * hx > room.width + EPS or 2 * hy > room.depth + EPS:
                continue
            x = rng.uniform(room.min.x + hx, max(room.min.x + hx, room.max.x - hx))
            y = rng.uniform(room.min.y + hy, max(room.min.y + hy, room.max.y - hy))
            fp = Footprint(Point2(float(x), float(y)), d.width, d.depth, yaw)
            box = footprint_aabb(fp)
            if any(rects_overlap(box, b) for b in boxes):
                continue
            placements[spec.object_id] = fp
            boxes.append(box)
            break
    return _finish(p, placements, [])


# perimeter walk: (yaw facing into the room, wall length attribute)
_WALLS = ("south", "east", "north", "west")


def _edge_footprint(room: Rect, wall: int, s: float, d: ObjectDims) -> Footprint:
    w, dp = d.width, d.depth
    x0, y0, x1, y1 = room.bounds()
    if wall == 0:
        return Footprint(Point2(x0 + s + w / 2, y0 + dp / 2), w, dp, 0)
    if wall == 1:
        return Footprint(Point2(x1 - dp / 2, y0 + s + w / 2), w, dp, 270)
    if wall == 2:
        return Footprint(Point2(x1 - s - w / 2, y1 - dp / 2), w, dp, 180)
    return Footprint(Point2(x0 + dp / 2, y1 - s - w / 2), w, dp, 90)


def _wall_param_end(room: Rect, wall: int, box: Rect) -> float:
    """Far end of ``box`` measured along the walk direction of ``wall``."""
    if wall == 0:
        return box.max.x - room.min.x
    if wall == 1:
        return box.max.y - room.min.y
    if wall == 2:
        return room.max.x - box.min.x
    return room.max.y - box.min.y


def solve_edge(p: PlacementProblem, seed: int = 0) -> Layout:
    """Greedy walk around the perimeter placing objects flush, backs to the wall."""
    room = p.room
    lengths = (room.width, room.depth, room.width, room.depth)
    placements: dict[str, Footprint] = {}
    boxes: list[Rect] = []
    wall, cursor = 0, 0.0
    for spec in p.graph.specs:
        d = p.dims(spec.object_id)
        for w in range(wall, 4):
            s = cursor if w == wall else 0.0
            done = False
            while s + d.width <= lengths[w] + EPS:
                fp = _edge_footprint(room, w, s, d)
                box = footprint_aabb(fp)
                if not rect_contains(room, box):
                    break
                hits = [b for b in boxes if rects_overlap(box, b)]
                if not hits:
                    placements[spec.object_id] = fp
                    boxes.append(box)
                    wall, cursor = w, s + d.width
                    done = True
                    break
                s = max(_wall_param_end(room, w, b) for b in hits)
            if done:
                break
    return _finish(p, placements, [])


def apply_absolute(room: Rect, provided: dict[str, Footprint],
                   graph: SceneGraph | None = None,
                   params: PredicateParams = PredicateParams()) -> Layout:
    """Take given coordinates verbatim and only report what is wrong with them."""
    oob, pairs = hard_violations(room, provided)
    diagnostics = [f"out_of_bounds:{i}" for i in oob] + [f"collision:{a},{b}" for a, b in pairs]
    score, total = (0, 0)
    if graph is not None:
        known = {k: v for k, v in provided.items() if k in graph.ids}
        score, total = score_layout(graph, known, room, params)
    return Layout(dict(provided), score, total, True, (), tuple(diagnostics))


STRATEGIES = {"dfs": solve_dfs, "random": solve_random, "edge": solve_edge}


# ---------------------------------------------------------------- serialization

def footprint_to_dict(f: Footprint) -> dict:
    return {"x": f.center.x, "y": f.center.y, "width": f.width, "depth": f.depth, "yaw": f.yaw}


def footprint_from_dict(d: dict, width: float | None = None, depth: float | None = None) -> Footprint:
    return Footprint(Point2(float(d["x"]), float(d["y"])),
                     float(d.get("width", width)), float(d.get("depth", depth)), int(d.get("yaw", 0)))


def parse_room_text(text: str) -> tuple[Rect, list[ObjectDims]]:
    """Room file: ``room | x0, y0, x1, y1`` then ``object id | width | depth``.

    Lengths in meters; ``room | w, d`` is shorthand for a room at the origin.
    Blank lines and ``#`` comments are ignored.
    """
    room, objects = None, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [q.strip() for q in line.split("|")]
        try:
            if parts[0] == "room" and len(parts) == 2:
                nums = [float(v) for v in parts[1].replace(",", " ").split()]
                if len(nums) == 2:
                    nums = [0.0, 0.0, *nums]
                if len(nums) != 4:
                    raise ValueError("room needs 'x0, y0, x1, y1' or 'width, depth'")
                room = Rect.from_bounds(*nums)
            elif len(parts) == 3:
                objects.append(ObjectDims(parts[0], float(parts[1]), float(parts[2])))
            else:
                raise ValueError(f"expected 'room | bounds' or 'id | width | depth', got {line!r}")
        except ValueError as exc:
            raise MalformedLine(f"line {lineno}: {exc}", lineno=lineno) from exc
    if room is None:
        raise MalformedLine("room file has no 'room | ...' line")
    return room, objects


def load_problem_files(room_path: str | Path, graph_path: str | Path, **kw) -> PlacementProblem:
    room, objects = parse_room_text(Path(room_path).read_text())
    graph = parse_scene_graph(Path(graph_path).read_text())
    return PlacementProblem(room, tuple(objects), graph, **kw)


def problem_to_dict(p: PlacementProblem) -> dict:
    return {
        "room": list(p.room.bounds()),
        "objects": [{"id": o.id, "width": o.width, "depth": o.depth} for o in p.objects],
        "constraints": p.graph.to_text(),
        "grid_step": p.grid_step,
        "max_candidates": p.max_candidates,
        "max_nodes": p.max_nodes,
        "params": p.params.to_dict(),
    }


def problem_from_dict(d: dict, graph: SceneGraph | None = None, **overrides) -> PlacementProblem:
    if graph is None:
        graph = parse_scene_graph(d["constraints"])
    kw = dict(
        room=Rect.from_bounds(*map(float, d["room"])),
        objects=tuple(ObjectDims(o["id"], float(o["width"]), float(o["depth"])) for o in d["objects"]),
        graph=graph,
        params=PredicateParams.from_dict(d["params"]) if "params" in d else PredicateParams(),
        grid_step=float(d.get("grid_step", DEFAULT_GRID_STEP)),
        max_candidates=d.get("max_candidates", DEFAULT_MAX_CANDIDATES),
        max_nodes=d.get("max_nodes", DEFAULT_MAX_NODES),
    )
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return PlacementProblem(**kw)


def layout_to_dict(layout: Layout) -> dict:
    return {
        "placements": {k: footprint_to_dict(v) for k, v in sorted(layout.placements.items())},
        "score": layout.score,
        "total": layout.total,
        "complete": layout.complete,
        "dropped": list(layout.dropped),
        "diagnostics": list(layout.diagnostics),
    }


def layout_from_dict(d: dict) -> Layout:
    return Layout(
        {k: footprint_from_dict(v) for k, v in d["placements"].items()},
        int(d.get("score", 0)), int(d.get("total", 0)), bool(d.get("complete", True)),
        tuple(d.get("dropped", ())), tuple(d.get("diagnostics", ())),
    )

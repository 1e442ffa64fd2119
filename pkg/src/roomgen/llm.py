"""Prompt templates, response parsers, backends and the generation pipeline.

A run makes three house-level calls (floor plan with wall height, doorways,
windows) and three calls per room (object selection, layout constraints,
wall-object placement): 3 + 3k calls for k rooms.

Backends map a rendered prompt to raw text. The fixture backend is a pure
lookup keyed by the SHA-256 of the prompt; a miss raises ``FixtureMiss``
rather than falling back to anything.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import re
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable, Protocol

from . import __version__
from .assembly import (
    PlacedObject,
    SceneDocument,
    place_ceiling_object,
    place_wall_object,
    quantize_document,
    spawn_small_objects,
    wall_interval,
)
from .constraints import PredicateParams, SceneGraph, parse_scene_graph
from .errors import (
    FixtureMiss,
    MalformedLine,
    MalformedStructure,
    MissingPlaceholder,
    NoAdjacentWall,
    OpeningCollision,
    ParseError,
    PlanInvalid,
    SceneError,
)
from .floorplan import (
    DIRECTIONS,
    FloorPlan,
    Room,
    adjacency_graph,
    exterior_walls,
    fmt_num,
    format_floor_plan_text,
    parse_room_line,
    validate_plan,
)
from .layout import DEFAULT_GRID_STEP, DEFAULT_MAX_CANDIDATES, ObjectDims, PlacementProblem, solve_dfs
from .openings import (
    PlacedDoor,
    PlacedWindow,
    format_door_line,
    format_window_line,
    parse_door_line,
    parse_window_line,
    place_doors,
    place_windows,
)
from .retrieval import (
    Catalog,
    HashingProvider,
    ObjectQuery,
    SimilarityProvider,
    retrieve,
    select_assets,
    select_door,
    select_material,
)

log = logging.getLogger(__name__)

TEMPLATE_IDS = ("floor_plan", "wall_height", "doorway", "window", "object_selection", "layout",
                "wall_placement")
HOUSE_STAGES = ("floor_plan", "doorway", "window")
ROOM_STAGES = ("object_selection", "layout", "wall_placement")

_PLACEHOLDER = re.compile(r"\{([a-z_]+)\}")


# ---------------------------------------------------------------- templates

@lru_cache(maxsize=None)
def template(template_id: str) -> str:
    if template_id not in TEMPLATE_IDS:
        raise KeyError(template_id)
    return resources.files("roomgen.data").joinpath("templates").joinpath(f"{template_id}.txt").read_text()


def placeholders(template_id: str) -> list[str]:
    return list(dict.fromkeys(_PLACEHOLDER.findall(template(template_id))))


def render(template_id: str, bindings: dict[str, object]) -> str:
    """Substitute ``{name}`` placeholders; every one must be bound."""
    body = template(template_id)
    missing = [n for n in placeholders(template_id) if n not in bindings]
    if missing:
        raise MissingPlaceholder(f"{template_id}: unbound placeholder {missing[0]!r}", name=missing[0])
    return _PLACEHOLDER.sub(lambda m: str(bindings[m[1]]), body)


# ---------------------------------------------------------------- parsers

def _strip_fences(raw: str) -> list[str]:
    return [ln for ln in raw.splitlines() if not ln.strip().startswith("```")]


def parse_floor_plan(raw: str) -> list[Room]:
    rooms = []
    for lineno, line in enumerate(_strip_fences(raw), 1):
        if line.strip():
            rooms.append(parse_room_line(line, lineno))
    return rooms


_HEIGHT = re.compile(r"^\s*([0-9]+(?:\.[0-9]*)?|\.[0-9]+)\s*(?:m|meters?|metres?)?\s*\.?\s*$", re.I)


def parse_wall_height(raw: str) -> float:
    """A bare number of meters; a trailing unit ("3.0 m") is tolerated."""
    m = _HEIGHT.match(raw.strip())
    if not m:
        raise ParseError(f"wall height must be a number of meters, got {raw.strip()!r}")
    v = float(m[1])
    if not (v > 0 and math.isfinite(v)):
        raise ParseError(f"wall height must be positive, got {v}")
    return v


def parse_floor_plan_response(raw: str) -> tuple[list[Room], float]:
    """Room lines followed by the wall height on the last non-blank line."""
    lines = [ln for ln in _strip_fences(raw) if ln.strip()]
    if len(lines) < 2:
        raise ParseError("expected room lines followed by a wall height")
    return parse_floor_plan("\n".join(lines[:-1])), parse_wall_height(lines[-1])


def parse_doorways(raw: str):
    return [parse_door_line(ln, i) for i, ln in enumerate(_strip_fences(raw), 1) if ln.strip()]


def parse_windows(raw: str):
    """Window lines, each checked against the window catalog."""
    return [parse_window_line(ln, i).check_catalog()
            for i, ln in enumerate(_strip_fences(raw), 1) if ln.strip()]


def outer_braces(raw: str) -> str:
    lo, hi = raw.find("{"), raw.rfind("}")
    if lo < 0 or hi < lo:
        raise MalformedStructure("no braced block in response")
    return raw[lo:hi + 1]


def _positive_int(v, what: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise MalformedStructure(f"{what} must be a positive integer, got {v!r}")
    return v


def parse_object_selection(raw: str) -> list[ObjectQuery]:
    """JSON block (after any prose) mapping object names to their fields.

    ``size`` is [length, width, height] in cm and becomes (w, d, h) with the
    length running along the object's front.
    """
    try:
        data = json.loads(outer_braces(raw))
    except json.JSONDecodeError as exc:
        raise MalformedStructure(f"object selection is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise MalformedStructure("object selection must be a JSON object")
    out = []
    for name, spec in data.items():
        if not isinstance(spec, dict):
            raise MalformedStructure(f"{name}: expected an object")
        try:
            size = spec["size"]
            if not (isinstance(size, list) and len(size) == 3 and all(isinstance(v, (int, float)) for v in size)):
                raise MalformedStructure(f"{name}: size must be [length, width, height]")
            if spec["location"] not in ("floor", "wall"):
                raise MalformedStructure(f"{name}: location must be floor or wall")
            children = []
            for ch in spec.get("objects_on_top", []):
                children.append(ObjectQuery(
                    description=str(ch["object_name"]),
                    location="on_object",
                    quantity=_positive_int(ch.get("quantity", 1), f"{name}/{ch['object_name']} quantity"),
                    variance_type=ch.get("variance_type", "same"),
                    name=str(ch["object_name"]),
                ))
            out.append(ObjectQuery(
                description=str(spec["description"]),
                target_dims_cm=tuple(float(v) for v in size),
                location=spec["location"],
                quantity=_positive_int(spec["quantity"], f"{name} quantity"),
                variance_type=spec["variance_type"],
                name=str(name),
                children=tuple(children),
            ))
        except (KeyError, TypeError) as exc:
            raise MalformedStructure(f"{name}: missing or bad field {exc}") from exc
    return out


def format_object_selection(queries: list[ObjectQuery]) -> str:
    data = {}
    for q in queries:
        data[q.name] = {
            "description": q.description,
            "location": q.location,
            "size": [fmt_json_num(v) for v in q.target_dims_cm],
            "quantity": q.quantity,
            "variance_type": q.variance_type,
            "objects_on_top": [
                {"object_name": c.name, "quantity": c.quantity, "variance_type": c.variance_type}
                for c in q.children
            ],
        }
    return json.dumps(data, indent=4)


def fmt_json_num(v: float):
    return int(v) if float(v).is_integer() else float(v)


def parse_layout(raw: str) -> SceneGraph:
    """Constraint lines are those containing '|'; prose around them is ignored."""
    return parse_scene_graph("\n".join(ln for ln in _strip_fences(raw) if "|" in ln))


@dataclass(frozen=True)
class WallPlacement:
    object_id: str
    above: str
    height_cm: float


def parse_wall_placement(raw: str) -> list[WallPlacement]:
    """``wall object | above, floor object | base height (cm)``"""
    out = []
    for lineno, line in enumerate(_strip_fences(raw), 1):
        if not line.strip():
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 3:
            raise MalformedLine(f"line {lineno}: expected 3 fields, got {len(parts)}", lineno=lineno)
        rel, _, target = parts[1].partition(",")
        if rel.strip() != "above" or not target.strip():
            raise MalformedLine(f"line {lineno}: expected 'above, <floor object>'", lineno=lineno)
        try:
            h = float(parts[2].removesuffix("cm").strip())
        except ValueError as exc:
            raise MalformedLine(f"line {lineno}: bad height {parts[2]!r}", lineno=lineno) from exc
        out.append(WallPlacement(parts[0], target.strip(), h))
    return out


def format_wall_placement(items: list[WallPlacement]) -> str:
    return "".join(f"{w.object_id} | above, {w.above} | {fmt_num(w.height_cm)}\n" for w in items)


# ---------------------------------------------------------------- backends

def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class Backend(Protocol):
    def complete(self, prompt: str, stage: str | None = None) -> str: ...


class FixtureBackend:
    """Read-only map from prompt hash to recorded response."""

    def __init__(self, path: str | Path):
        path = Path(path)
        if path.is_dir():
            path = path / "fixtures.jsonl"
        self.path = path
        self._responses: dict[str, str] = {}
        for line in path.read_text().splitlines():
            if line.strip():
                rec = json.loads(line)
                self._responses[rec["hash"]] = rec["response"]

    def __len__(self) -> int:
        return len(self._responses)

    def complete(self, prompt: str, stage: str | None = None) -> str:
        try:
            return self._responses[prompt_hash(prompt)]
        except KeyError:
            raise FixtureMiss(f"no recorded response for stage {stage or '?'}", stage=stage) from None


class ScriptedBackend:
    """Answers by stage name; used to author fixtures from hand-written responses."""

    def __init__(self, responses: dict[str, str]):
        self.responses = dict(responses)

    def complete(self, prompt: str, stage: str | None = None) -> str:
        try:
            return self.responses[stage]
        except KeyError:
            raise FixtureMiss(f"no scripted response for stage {stage or '?'}", stage=stage) from None


class RecordingBackend:
    """Wraps another backend and keeps every exchange for a fixture file."""

    def __init__(self, inner: Backend):
        self.inner = inner
        self.records: dict[str, dict] = {}
        self._lock = threading.Lock()

    def complete(self, prompt: str, stage: str | None = None) -> str:
        response = self.inner.complete(prompt, stage)
        with self._lock:
            self.records[prompt_hash(prompt)] = {
                "hash": prompt_hash(prompt), "stage": stage, "prompt": prompt, "response": response,
            }
        return response

    def dump(self, path: str | Path) -> None:
        recs = sorted(self.records.values(), key=lambda r: (r["stage"] or "", r["hash"]))
        Path(path).write_text("".join(json.dumps(r, sort_keys=True) + "\n" for r in recs))


class LiveBackend:
    """Chat-completion endpoint at ``$LLM_BASE_URL`` with key ``$LLM_API_KEY``."""

    def __init__(self, base_url: str | None = None, api_key: str | None = None,
                 model: str | None = None, temperature: float = 0.0,
                 timeout: float = 120.0, client=None):
        import httpx

        self.base_url = (base_url or os.environ.get("LLM_BASE_URL", "")).rstrip("/")
        if not self.base_url:
            raise SceneError("LLM_BASE_URL is not set")
        self.api_key = api_key if api_key is not None else os.environ.get("LLM_API_KEY", "")
        self.model = model or os.environ.get("LLM_MODEL", "gpt-4")
        self.temperature = temperature
        self.client = client or httpx.Client(timeout=timeout)

    def complete(self, prompt: str, stage: str | None = None) -> str:
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        body = {
            "model": self.model,
            "temperature": self.temperature,
            "messages": [{"role": "user", "content": prompt}],
        }
        r = self.client.post(f"{self.base_url}/chat/completions", json=body, headers=headers)
        r.raise_for_status()
        try:
            return r.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise MalformedStructure(f"unexpected completion payload: {exc}") from exc


# ---------------------------------------------------------------- transcript

@dataclass(frozen=True)
class CallRecord:
    template_id: str
    stage: str
    rendered_prompt: str
    raw_response: str
    parse_result: str


@dataclass
class GatewayTranscript:
    calls: list[CallRecord] = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.calls)

    @property
    def call_count(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for c in self.calls:
            out[c.template_id] = out.get(c.template_id, 0) + 1
        return out

    def to_jsonl(self) -> str:
        return "".join(
            json.dumps({
                "template_id": c.template_id, "stage": c.stage, "rendered_prompt": c.rendered_prompt,
                "raw_response": c.raw_response, "parse_result": c.parse_result,
            }, sort_keys=True) + "\n"
            for c in self.calls
        )


class PipelineError(SceneError):
    """A stage failed; ``transcript`` holds the calls made up to the failure."""

    code = "pipeline_failed"

    def __init__(self, cause: SceneError, transcript: GatewayTranscript, stage: str):
        super().__init__(f"{stage}: {cause}", stage=stage)
        self.code = getattr(cause, "code", self.code)
        self.cause = cause
        self.transcript = transcript
        self.stage = stage


def _call(backend: Backend, calls: list[CallRecord], template_id: str, stage: str,
          prompt: str, parse: Callable[[str], object], summarize: Callable[[object], str]):
    raw = backend.complete(prompt, stage)
    try:
        parsed = parse(raw)
    except SceneError:
        calls.append(CallRecord(template_id, stage, prompt, raw, "<error>"))
        raise
    calls.append(CallRecord(template_id, stage, prompt, raw, summarize(parsed)))
    return parsed


# ---------------------------------------------------------------- pipeline

@dataclass(frozen=True)
class PipelineConfig:
    params: PredicateParams = PredicateParams()
    grid_step: float = DEFAULT_GRID_STEP
    max_candidates: int = DEFAULT_MAX_CANDIDATES
    threads: int = 1
    ceiling_query: str = "ceiling light"

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        kw = {k: d[k] for k in ("grid_step", "max_candidates", "threads", "ceiling_query") if k in d}
        if "predicates" in d:
            kw["params"] = PredicateParams.from_dict(d["predicates"])
        return cls(**kw)


def room_size_text(room: Room) -> str:
    r = room.rect
    return f"{fmt_num(r.width)}m x {fmt_num(r.depth)}m"


def floor_plan_prompt(input_text: str, requirements: str) -> str:
    b = {"input": input_text, "additional_requirements": requirements}
    return (render("floor_plan", b) + "\n" + render("wall_height", b)
            + "List the rooms first and give the wall height alone on the last line.\n")


def doorway_prompt(input_text: str, requirements: str, plan: FloorPlan) -> str:
    sizes = "\n".join(
        f"{r.name}: {fmt_num(r.rect.width)} x {fmt_num(r.rect.depth)} x {fmt_num(plan.wall_height)}"
        for r in plan.rooms
    )
    g = adjacency_graph(plan)
    order = {n: i for i, n in enumerate(plan.names)}
    pairs = sorted((tuple(sorted(e, key=order.get)) for e in g.edges), key=lambda p: (order[p[0]], order[p[1]]))
    return render("doorway", {
        "input": input_text,
        "rooms": ", ".join(plan.names),
        "room_sizes": sizes,
        "room_pairs": ", ".join(f"({a}, {b})" for a, b in pairs) or "none",
        "additional_requirements": requirements,
    })


def window_prompt(input_text: str, requirements: str, plan: FloorPlan) -> str:
    ext = exterior_walls(plan)
    lines = []
    for r in plan.rooms:
        best: dict[str, float] = {}
        for w in ext:
            if w.room_name == r.name:
                best[w.direction] = max(best.get(w.direction, 0.0), w.length)
        walls = ", ".join(f"({d}, {fmt_num(round(best[d] * 100, 6))})" for d in DIRECTIONS if d in best)
        lines.append(f"{r.name}: {walls or 'none'}")
    return render("window", {
        "input": input_text,
        "wall_height": fmt_num(round(plan.wall_height * 100, 6)),
        "walls": "\n".join(lines),
        "additional_requirements": requirements,
    })


@dataclass
class RoomResult:
    calls: list[CallRecord]
    objects: list[PlacedObject]
    diagnostics: list[str]


def _instances(queries: list[ObjectQuery], catalog: Catalog, provider: SimilarityProvider):
    """(instance id, asset, query) for every requested copy, ids ``name-i``."""
    out = []
    for q in queries:
        for i, asset in enumerate(select_assets(catalog, q, provider)):
            out.append((f"{q.name}-{i}", asset, q))
    return out


def furnish_room(room: Room, index: int, input_text: str, requirements: str, plan: FloorPlan,
                 doors: list[PlacedDoor], windows: list[PlacedWindow], backend: Backend,
                 catalog: Catalog, provider: SimilarityProvider, seed: int,
                 config: PipelineConfig, calls: list[CallRecord] | None = None) -> RoomResult:
    calls = [] if calls is None else calls
    diags: list[str] = []
    tag = f":{room.name}"
    size_text = room_size_text(room)

    queries = _call(
        backend, calls, "object_selection", "object_selection" + tag,
        render("object_selection", {"input": input_text, "room_type": room.room_type,
                                    "room_size": size_text, "additional_requirements": requirements}),
        parse_object_selection, format_object_selection,
    )
    floor_q = [q for q in queries if q.location == "floor"]
    wall_q = [q for q in queries if q.location == "wall"]
    floor_inst = _instances(floor_q, catalog, provider)
    wall_inst = _instances(wall_q, catalog, provider)

    graph = _call(
        backend, calls, "layout", "layout" + tag,
        render("layout", {"room_type": room.room_type, "room_size": size_text,
                          "objects": ", ".join(i for i, _, _ in floor_inst)}),
        parse_layout, lambda g: g.to_text(),
    )
    by_id = {iid: (asset, q) for iid, asset, q in floor_inst}
    unknown = [i for i in graph.ids if i not in by_id]
    if unknown:
        raise MalformedStructure(f"{room.name}: layout names unknown object {unknown[0]!r}")
    for iid in by_id:
        if iid not in graph.ids:
            diags.append(f"{room.name}:unconstrained:{iid}")
    objects: list[PlacedObject] = []
    if graph.specs:
        dims = [ObjectDims(i, by_id[i][0].dims_cm[0] / 100, by_id[i][0].dims_cm[1] / 100) for i in graph.ids]
        problem = PlacementProblem(room.rect, tuple(dims), graph, config.params,
                                   config.grid_step, config.max_candidates)
        layout = solve_dfs(problem, seed=seed + index)
        diags.extend(f"{room.name}:{d}" for d in layout.diagnostics)
        for iid in graph.ids:
            if iid in layout.placements:
                f = layout.placements[iid]
                asset = by_id[iid][0]
                objects.append(PlacedObject(
                    iid, asset.asset_id, room.name, "floor", (f.center.x, f.center.y, 0.0), f.yaw,
                    (asset.dims_cm[0] / 100, asset.dims_cm[1] / 100, asset.dims_cm[2] / 100),
                ))
    floor_by_id = {o.instance_id: o for o in objects}

    placements = _call(
        backend, calls, "wall_placement", "wall_placement" + tag,
        render("wall_placement", {
            "input": input_text, "room_type": room.room_type, "room_size": size_text,
            "floor_objects": ", ".join(o.instance_id for o in objects) or "none",
            "objects": ", ".join(i for i, _, _ in wall_inst) or "none",
            "wall_height": fmt_num(round(plan.wall_height * 100, 6)),
        }),
        parse_wall_placement, format_wall_placement,
    )
    wall_assets = {iid: asset for iid, asset, _ in wall_inst}
    room_doors = [d for d in doors if room.name in (d.spec.room_a, d.spec.room_b)]
    room_windows = [w for w in windows if w.spec.room == room.name]
    hung: list[PlacedObject] = []
    for wp in placements:
        if wp.object_id not in wall_assets:
            raise MalformedStructure(f"{room.name}: wall placement names unknown object {wp.object_id!r}")
        if wp.above not in floor_by_id:
            diags.append(f"{room.name}:dropped_wall:{wp.object_id}:no_floor_object")
            continue
        a = wall_assets[wp.object_id]
        size = (a.dims_cm[0] / 100, a.dims_cm[1] / 100, a.dims_cm[2] / 100)
        try:
            o = place_wall_object(wp.object_id, a.asset_id, size, floor_by_id[wp.above], wp.height_cm,
                                  room, room_doors, room_windows, config.params.edge_max_wall_gap)
        except (NoAdjacentWall, OpeningCollision) as exc:
            diags.append(f"{room.name}:dropped_wall:{wp.object_id}:{exc.code}")
            continue
        if o.top > plan.wall_height + 1e-9:
            diags.append(f"{room.name}:dropped_wall:{wp.object_id}:above_ceiling")
            continue
        i0, i1 = wall_interval(o)
        if any(h.yaw == o.yaw and i0 < wall_interval(h)[1] and i1 > wall_interval(h)[0]
               and abs((o.position[2] + o.size[2] / 2) - (h.position[2] + h.size[2] / 2))
               < (o.size[2] + h.size[2]) / 2 for h in hung):
            diags.append(f"{room.name}:dropped_wall:{wp.object_id}:wall_overlap")
            continue
        hung.append(o)
    objects.extend(hung)

    # small objects on top of placed floor objects
    counters: dict[str, int] = {}
    for iid, asset, q in floor_inst:
        if not q.children or iid not in floor_by_id:
            continue
        kids = []
        for cq in q.children:
            for casset in select_assets(catalog, cq, provider):
                k = counters.get(cq.name, 0)
                counters[cq.name] = k + 1
                kids.append((f"{cq.name}-{k}", casset.asset_id,
                             tuple(v / 100 for v in casset.dims_cm)))
        small, d = spawn_small_objects(floor_by_id[iid], kids, seed=seed + index)
        objects.extend(small)
        diags.extend(f"{room.name}:{x}" for x in d)

    ceiling = [r for r in catalog.records if r.on_ceiling]
    if ceiling:
        q = ObjectQuery(f"{config.ceiling_query} for {room.room_type}", location="ceiling")
        a = retrieve(ceiling, q, provider, 1)[0][0]
        objects.append(place_ceiling_object("ceiling-0", a.asset_id, tuple(v / 100 for v in a.dims_cm),
                                            room, plan.wall_height))
    return RoomResult(calls, objects, diags)


def run_pipeline(input_text: str, requirements: str, backend: Backend, catalog: Catalog,
                 provider: SimilarityProvider | None = None, seed: int = 0,
                 config: PipelineConfig = PipelineConfig()) -> tuple[SceneDocument, GatewayTranscript]:
    provider = provider or HashingProvider()
    requirements = requirements or "N/A"
    transcript = GatewayTranscript()
    calls = transcript.calls
    stage = "floor_plan"
    try:
        rooms, height = _call(
            backend, calls, "floor_plan", stage, floor_plan_prompt(input_text, requirements),
            parse_floor_plan_response,
            lambda rh: format_floor_plan_text(FloorPlan(tuple(rh[0]), rh[1])) + fmt_num(rh[1]) + "\n",
        )
        rooms = [
            replace(r, floor=select_material(r.floor_text, provider), wall=select_material(r.wall_text, provider))
            for r in rooms
        ]
        plan = FloorPlan(tuple(rooms), height)
        report = validate_plan(plan)
        if not report.ok:
            raise PlanInvalid("; ".join(f"{f.code}: {f.message}" for f in report.errors),
                              codes=report.codes())

        stage = "doorway"
        door_specs = _call(backend, calls, "doorway", stage, doorway_prompt(input_text, requirements, plan),
                           parse_doorways, lambda ds: "".join(format_door_line(d) + "\n" for d in ds))
        doors = place_doors(plan, door_specs)
        door_assets = [None if d.is_open else select_door(d.spec.style_query, provider).door_id for d in doors]

        stage = "window"
        win_specs = _call(backend, calls, "window", stage, window_prompt(input_text, requirements, plan),
                          parse_windows, lambda ws: "".join(format_window_line(w) + "\n" for w in ws))
        windows = place_windows(plan, win_specs, doors)

        room_calls: list[list[CallRecord]] = [[] for _ in plan.rooms]

        def work(i):
            return furnish_room(plan.rooms[i], i, input_text, requirements, plan, doors, windows,
                                backend, catalog, provider, seed, config, room_calls[i])

        results = []
        if config.threads > 1:
            with ThreadPoolExecutor(max_workers=config.threads) as pool:
                futures = [pool.submit(work, i) for i in range(len(plan.rooms))]
                for i, fut in enumerate(futures):
                    stage = f"room:{plan.rooms[i].name}"
                    try:
                        results.append(fut.result())
                    except SceneError:
                        for f in futures:
                            f.cancel()
                        raise
        else:
            for i in range(len(plan.rooms)):
                stage = f"room:{plan.rooms[i].name}"
                results.append(work(i))
    except SceneError as exc:
        if stage.startswith("room:"):
            # calls of the rooms before the failing one, then its partial calls
            for rc in room_calls[:len(results) + 1]:
                calls.extend(rc)
        stage = getattr(exc, "context", {}).get("stage") or stage
        raise PipelineError(exc, transcript, stage) from exc

    objects, diags = [], []
    for res in results:
        calls.extend(res.calls)
        objects.extend(res.objects)
        diags.extend(res.diagnostics)
    doc = SceneDocument(
        metadata={"prompt": input_text, "requirements": requirements, "seed": seed,
                  "generator": f"roomgen {__version__}"},
        plan=plan, doors=doors, windows=windows, objects=objects,
        door_assets=door_assets, diagnostics=diags,
    )
    return quantize_document(doc), transcript

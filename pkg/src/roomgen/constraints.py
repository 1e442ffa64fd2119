"""Spatial-relation constraints: taxonomy, line DSL and predicate semantics.

DSL, one object per line::

    coffee table-0 | middle | near, sofa-0 | in front of, sofa-0

The first field is the object id, exactly one field is a global constraint
(``edge`` or ``middle``) and every other field is ``relation, target``.
Targets must name an object defined on an earlier line.

Predicates
----------
All distances are surface-to-surface gaps between footprint bounds.

=============== ===========================================================
edge            nearest wall gap <= ``edge_max_wall_gap``
middle          nearest wall gap >= ``middle_min_wall_gap``
near            ``near_min`` < gap < ``near_max``
far             gap >= ``far_min``
center aligned  centers differ by <= ``align_tolerance`` in x or in y
face to         angle between facing and the direction to the target's
                center <= ``face_tolerance``
in front of     subject center lies beyond the target's front face, within
                the target's half width + ``front_lateral_slack`` laterally
side of         subject center lies outside the target's lateral extent
                (left or right), within its depth band
=============== ===========================================================

``above`` and ``on top of`` are out-of-plane and handled by scene assembly.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import (
    DuplicateObject,
    ForwardReference,
    MissingGlobal,
    MissingTarget,
    UnknownConstraint,
    UnsupportedInFloorSolver,
)
from .geometry import EPS, Footprint, Rect, axis_gaps, footprint_aabb, wall_gap


class Kind(str, Enum):
    EDGE = "edge"
    MIDDLE = "middle"
    NEAR = "near"
    FAR = "far"
    IN_FRONT_OF = "in front of"
    SIDE_OF = "side of"
    ABOVE = "above"
    ON_TOP_OF = "on top of"
    CENTER_ALIGNED = "center aligned"
    FACE_TO = "face to"

    @property
    def is_global(self) -> bool:
        return self in (Kind.EDGE, Kind.MIDDLE)

    @property
    def is_distance(self) -> bool:
        return self in (Kind.NEAR, Kind.FAR)

    @property
    def out_of_plane(self) -> bool:
        return self in (Kind.ABOVE, Kind.ON_TOP_OF)


_ALIASES = {
    "center align": Kind.CENTER_ALIGNED,
    "center align with": Kind.CENTER_ALIGNED,
    "center aligned with": Kind.CENTER_ALIGNED,
    "centre aligned": Kind.CENTER_ALIGNED,
    "face": Kind.FACE_TO,
    "facing": Kind.FACE_TO,
    "in front": Kind.IN_FRONT_OF,
    "on top": Kind.ON_TOP_OF,
}


def parse_kind(token: str) -> Kind:
    t = " ".join(token.lower().split())
    try:
        return Kind(t)
    except ValueError:
        pass
    if t in _ALIASES:
        return _ALIASES[t]
    raise UnknownConstraint(f"unknown constraint {token!r}", token=token)


@dataclass(frozen=True)
class Constraint:
    kind: Kind
    target: str | None = None

    def __str__(self) -> str:
        return self.kind.value if self.target is None else f"{self.kind.value}, {self.target}"


@dataclass(frozen=True)
class ConstraintSpec:
    object_id: str
    global_: Constraint
    relations: tuple[Constraint, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(self.relations))

    @property
    def constraints(self) -> tuple[Constraint, ...]:
        return (self.global_,) + self.relations

    @property
    def targets(self) -> list[str]:
        return [c.target for c in self.relations if c.target is not None]

    def to_line(self) -> str:
        return " | ".join([self.object_id] + [str(c) for c in self.constraints])


@dataclass(frozen=True)
class SceneGraph:
    specs: tuple[ConstraintSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "specs", tuple(self.specs))
        check_order(self.specs)

    @property
    def ids(self) -> list[str]:
        return [s.object_id for s in self.specs]

    @property
    def anchor(self) -> ConstraintSpec | None:
        return self.specs[0] if self.specs else None

    def spec(self, object_id: str) -> ConstraintSpec:
        for s in self.specs:
            if s.object_id == object_id:
                return s
        raise KeyError(object_id)

    def total_constraints(self) -> int:
        return sum(len(s.constraints) for s in self.specs)

    def to_text(self) -> str:
        return "".join(s.to_line() + "\n" for s in self.specs)


def check_order(specs) -> None:
    seen: set[str] = set()
    for s in specs:
        if s.object_id in seen:
            raise DuplicateObject(f"object {s.object_id!r} defined twice", object_id=s.object_id)
        for c in s.relations:
            if c.target is None:
                raise MissingTarget(f"{s.object_id}: {c.kind.value} needs a target")
            if c.target not in seen:
                raise ForwardReference(
                    f"{s.object_id} refers to {c.target!r} before it is defined",
                    object_id=s.object_id, target=c.target,
                )
        seen.add(s.object_id)


def parse_spec_line(line: str) -> ConstraintSpec:
    fields_ = [f.strip() for f in line.split("|")]
    obj = fields_[0]
    if not obj:
        raise UnknownConstraint(f"missing object id in {line!r}", token=line)
    globals_, relations = [], []
    for field in fields_[1:]:
        if not field:
            continue
        kind_tok, _, target = field.partition(",")
        kind = parse_kind(kind_tok)
        target = target.strip() or None
        if kind.is_global:
            if target is not None:
                raise UnknownConstraint(f"global constraint {kind.value!r} takes no target", token=field)
            globals_.append(Constraint(kind))
        else:
            if target is None:
                raise MissingTarget(f"{obj}: {kind.value} needs a target", object_id=obj)
            relations.append(Constraint(kind, target))
    if len(globals_) != 1:
        raise MissingGlobal(
            f"{obj}: expected exactly one global constraint, got {len(globals_)}", object_id=obj
        )
    return ConstraintSpec(obj, globals_[0], tuple(relations))


def parse_scene_graph(text: str) -> SceneGraph:
    specs = [parse_spec_line(line) for line in text.splitlines() if line.strip()]
    return SceneGraph(tuple(specs))


# ---------------------------------------------------------------- parameters

@dataclass(frozen=True)
class PredicateParams:
    near_min: float = 0.5
    near_max: float = 1.5
    far_min: float = 1.5
    edge_max_wall_gap: float = 0.3
    middle_min_wall_gap: float = 0.5
    face_tolerance: float = 45.0  # degrees, in (0, 90)
    align_tolerance: float = 0.05
    front_lateral_slack: float = 0.5
    # "euclidean" for the floor solvers; the MILP uses the per-axis maximum
    distance_metric: str = "euclidean"

    def __post_init__(self):
        if not (self.near_min < self.near_max <= self.far_min):
            raise ValueError("need near_min < near_max <= far_min")
        if not self.edge_max_wall_gap < self.middle_min_wall_gap:
            raise ValueError("need edge_max_wall_gap < middle_min_wall_gap")
        if not 0 < self.face_tolerance < 90:
            raise ValueError("face_tolerance must be in (0, 90) degrees")
        if self.distance_metric not in ("euclidean", "chebyshev"):
            raise ValueError(f"unknown distance metric {self.distance_metric!r}")

    @property
    def face_slope(self) -> float:
        return math.tan(math.radians(self.face_tolerance))

    @classmethod
    def from_dict(cls, data: dict) -> "PredicateParams":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown predicate parameters: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path: str | Path) -> "PredicateParams":
        data = json.loads(Path(path).read_text())
        return cls.from_dict(data.get("predicates", data))

    def to_dict(self) -> dict:
        return asdict(self)

    def with_metric(self, metric: str) -> "PredicateParams":
        return replace(self, distance_metric=metric)


# ---------------------------------------------------------------- semantics

def _perp(f: tuple[float, float]) -> tuple[float, float]:
    return f[1], -f[0]


def surface_gap(a: Rect, b: Rect, metric: str = "euclidean") -> float:
    dx, dy = axis_gaps(a, b)
    return math.hypot(dx, dy) if metric == "euclidean" else max(dx, dy)


def eval_constraint(c: Constraint, subject: Footprint, target: Footprint | None,
                    room: Rect, p: PredicateParams = PredicateParams()) -> bool:
    """Boolean value of one constraint for a concrete subject placement."""
    kind = c.kind
    if kind.out_of_plane:
        raise UnsupportedInFloorSolver(f"{kind.value} is not a floor-plane relation")
    box = footprint_aabb(subject)
    if kind is Kind.EDGE:
        return wall_gap(box, room) <= p.edge_max_wall_gap + EPS
    if kind is Kind.MIDDLE:
        return wall_gap(box, room) >= p.middle_min_wall_gap - EPS

    if target is None:
        raise MissingTarget(f"{kind.value} needs a target footprint")
    tbox = footprint_aabb(target)
    s, t = subject.center, target.center

    if kind is Kind.NEAR:
        g = surface_gap(box, tbox, p.distance_metric)
        return p.near_min + EPS < g < p.near_max - EPS
    if kind is Kind.FAR:
        return surface_gap(box, tbox, p.distance_metric) >= p.far_min - EPS
    if kind is Kind.CENTER_ALIGNED:
        return abs(s.x - t.x) <= p.align_tolerance + EPS or abs(s.y - t.y) <= p.align_tolerance + EPS
    if kind is Kind.FACE_TO:
        vx, vy = t.x - s.x, t.y - s.y
        if abs(vx) <= EPS and abs(vy) <= EPS:
            return False
        f = subject.facing
        n = _perp(f)
        lon = vx * f[0] + vy * f[1]
        lat = vx * n[0] + vy * n[1]
        return p.face_slope * lon >= abs(lat) - EPS and lon > EPS
    if kind in (Kind.IN_FRONT_OF, Kind.SIDE_OF):
        ux, uy = s.x - t.x, s.y - t.y
        f = target.facing
        n = _perp(f)
        lon = ux * f[0] + uy * f[1]
        lat = ux * n[0] + uy * n[1]
        if kind is Kind.IN_FRONT_OF:
            return lon > target.depth / 2 + EPS and abs(lat) <= target.width / 2 + p.front_lateral_slack + EPS
        return abs(lat) >= target.width / 2 - EPS and abs(lon) <= target.depth / 2 + EPS
    raise UnknownConstraint(f"no semantics for {kind}")


def score_placement(spec: ConstraintSpec, subject: Footprint, placed: dict[str, Footprint],
                    room: Rect, p: PredicateParams = PredicateParams()) -> int:
    """Number of this object's constraints (global included) the placement meets.

    Relations whose target is not in ``placed`` count as unsatisfied.
    """
    n = 0
    for c in spec.constraints:
        if c.target is not None and c.target not in placed:
            if c.kind.out_of_plane:
                raise UnsupportedInFloorSolver(f"{c.kind.value} is not a floor-plane relation")
            continue
        if eval_constraint(c, subject, placed.get(c.target) if c.target else None, room, p):
            n += 1
    return n


# ---------------------------------------------------------------- batch form

@dataclass
class Candidates:
    """Column arrays describing many placements of the same object."""

    cx: np.ndarray
    cy: np.ndarray
    yaw: np.ndarray
    hx: np.ndarray
    hy: np.ndarray
    width: float
    depth: float

    @classmethod
    def build(cls, cx, cy, yaw, width: float, depth: float) -> "Candidates":
        cx = np.asarray(cx, dtype=float)
        cy = np.asarray(cy, dtype=float)
        yaw = np.asarray(yaw, dtype=int)
        turned = (yaw == 90) | (yaw == 270)
        hx = np.where(turned, depth / 2, width / 2)
        hy = np.where(turned, width / 2, depth / 2)
        return cls(cx, cy, yaw, hx, hy, width, depth)

    def __len__(self) -> int:
        return len(self.cx)

    def take(self, idx) -> "Candidates":
        return Candidates(self.cx[idx], self.cy[idx], self.yaw[idx], self.hx[idx],
                          self.hy[idx], self.width, self.depth)

    def footprint(self, i: int) -> Footprint:
        from .geometry import Point2

        return Footprint(Point2(float(self.cx[i]), float(self.cy[i])),
                         self.width, self.depth, int(self.yaw[i]))

    def facing(self) -> tuple[np.ndarray, np.ndarray]:
        fx = np.select([self.yaw == 90, self.yaw == 270], [1.0, -1.0], 0.0)
        fy = np.select([self.yaw == 0, self.yaw == 180], [1.0, -1.0], 0.0)
        return fx, fy

    def overlaps(self, box: Rect) -> np.ndarray:
        return (
            (self.cx - self.hx < box.max.x - EPS)
            & (box.min.x < self.cx + self.hx - EPS)
            & (self.cy - self.hy < box.max.y - EPS)
            & (box.min.y < self.cy + self.hy - EPS)
        )

    def wall_gaps(self, room: Rect) -> np.ndarray:
        return np.minimum.reduce([
            self.cx - self.hx - room.min.x,
            room.max.x - self.cx - self.hx,
            self.cy - self.hy - room.min.y,
            room.max.y - self.cy - self.hy,
        ])


def batch_eval(c: Constraint, cand: Candidates, target: Footprint | None,
               room: Rect, p: PredicateParams = PredicateParams()) -> np.ndarray:
    """Vectorized :func:`eval_constraint` over every row of ``cand``."""
    kind = c.kind
    if kind.out_of_plane:
        raise UnsupportedInFloorSolver(f"{kind.value} is not a floor-plane relation")
    if kind is Kind.EDGE:
        return cand.wall_gaps(room) <= p.edge_max_wall_gap + EPS
    if kind is Kind.MIDDLE:
        return cand.wall_gaps(room) >= p.middle_min_wall_gap - EPS
    if target is None:
        raise MissingTarget(f"{kind.value} needs a target footprint")
    tbox = footprint_aabb(target)
    t = target.center

    if kind.is_distance:
        dx = np.maximum.reduce([np.zeros(len(cand)), tbox.min.x - (cand.cx + cand.hx),
                                (cand.cx - cand.hx) - tbox.max.x])
        dy = np.maximum.reduce([np.zeros(len(cand)), tbox.min.y - (cand.cy + cand.hy),
                                (cand.cy - cand.hy) - tbox.max.y])
        g = np.hypot(dx, dy) if p.distance_metric == "euclidean" else np.maximum(dx, dy)
        if kind is Kind.NEAR:
            return (g > p.near_min + EPS) & (g < p.near_max - EPS)
        return g >= p.far_min - EPS
    if kind is Kind.CENTER_ALIGNED:
        return (np.abs(cand.cx - t.x) <= p.align_tolerance + EPS) | (
            np.abs(cand.cy - t.y) <= p.align_tolerance + EPS)
    if kind is Kind.FACE_TO:
        vx, vy = t.x - cand.cx, t.y - cand.cy
        fx, fy = cand.facing()
        lon = vx * fx + vy * fy
        lat = vx * fy - vy * fx
        nonzero = (np.abs(vx) > EPS) | (np.abs(vy) > EPS)
        return nonzero & (p.face_slope * lon >= np.abs(lat) - EPS) & (lon > EPS)
    if kind in (Kind.IN_FRONT_OF, Kind.SIDE_OF):
        ux, uy = cand.cx - t.x, cand.cy - t.y
        f = target.facing
        lon = ux * f[0] + uy * f[1]
        lat = ux * f[1] - uy * f[0]
        if kind is Kind.IN_FRONT_OF:
            return (lon > target.depth / 2 + EPS) & (
                np.abs(lat) <= target.width / 2 + p.front_lateral_slack + EPS)
        return (np.abs(lat) >= target.width / 2 - EPS) & (np.abs(lon) <= target.depth / 2 + EPS)
    raise UnknownConstraint(f"no semantics for {kind}")

"""Independent reference implementations used to freeze expected values.

Nothing here calls the solver code paths under test. Predicates are
re-derived from the semantics table in numpy form, and searches are plain
exhaustive enumeration over the same candidate grid.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

FACING = {0: (0.0, 1.0), 90: (1.0, 0.0), 180: (0.0, -1.0), 270: (-1.0, 0.0)}
EPS = 1e-9


# ---------------------------------------------------------------- grid

def axis_centers(lo: float, hi: float, half: float, step: float) -> list[float]:
    """Lattice points lo + k*step that keep the extent inside, plus both flush ends."""
    first, last = lo + half, hi - half
    if last < first - EPS:
        return []
    pts = {round(first, 9), round(max(first, last), 9)}
    k = 0
    while lo + k * step <= last + EPS:
        v = lo + k * step
        if v >= first - EPS:
            pts.add(round(v, 9))
        k += 1
    return sorted(pts)


@dataclass
class Cands:
    x: np.ndarray
    y: np.ndarray
    yaw: np.ndarray
    w: float
    d: float

    @property
    def hx(self):
        return np.where(np.isin(self.yaw, (90, 270)), self.d / 2, self.w / 2)

    @property
    def hy(self):
        return np.where(np.isin(self.yaw, (90, 270)), self.w / 2, self.d / 2)

    def __len__(self):
        return len(self.x)


def candidates(room, w: float, d: float, step: float) -> Cands:
    x0, y0, x1, y1 = room
    xs, ys, yaws = [], [], []
    for yaw in (0, 90, 180, 270):
        hx, hy = (d / 2, w / 2) if yaw in (90, 270) else (w / 2, d / 2)
        for x in axis_centers(x0, x1, hx, step):
            for y in axis_centers(y0, y1, hy, step):
                xs.append(x)
                ys.append(y)
                yaws.append(yaw)
    return Cands(np.array(xs, float), np.array(ys, float), np.array(yaws, int), w, d)


# ---------------------------------------------------------------- predicates

def _pair_gaps(s: Cands, t: Cands):
    """Per-axis surface gaps, shape (len(s), len(t))."""
    sx, sy, shx, shy = s.x[:, None], s.y[:, None], s.hx[:, None], s.hy[:, None]
    tx, ty, thx, thy = t.x[None, :], t.y[None, :], t.hx[None, :], t.hy[None, :]
    dx = np.maximum(0.0, np.maximum((tx - thx) - (sx + shx), (sx - shx) - (tx + thx)))
    dy = np.maximum(0.0, np.maximum((ty - thy) - (sy + shy), (sy - shy) - (ty + thy)))
    return dx, dy


def overlap_matrix(a: Cands, b: Cands) -> np.ndarray:
    ax0, ax1 = (a.x - a.hx)[:, None], (a.x + a.hx)[:, None]
    ay0, ay1 = (a.y - a.hy)[:, None], (a.y + a.hy)[:, None]
    bx0, bx1 = (b.x - b.hx)[None, :], (b.x + b.hx)[None, :]
    by0, by1 = (b.y - b.hy)[None, :], (b.y + b.hy)[None, :]
    return (ax0 < bx1 - EPS) & (bx0 < ax1 - EPS) & (ay0 < by1 - EPS) & (by0 < ay1 - EPS)


def wall_gap(c: Cands, room) -> np.ndarray:
    x0, y0, x1, y1 = room
    return np.minimum.reduce([c.x - c.hx - x0, x1 - c.x - c.hx, c.y - c.hy - y0, y1 - c.y - c.hy])


def unary(kind: str, c: Cands, room, prm) -> np.ndarray:
    g = wall_gap(c, room)
    if kind == "edge":
        return g <= prm["edge_max_wall_gap"] + EPS
    if kind == "middle":
        return g >= prm["middle_min_wall_gap"] - EPS
    raise ValueError(kind)


def relation(kind: str, s: Cands, t: Cands, prm, metric: str = "euclidean") -> np.ndarray:
    """Boolean matrix [subject candidate, target candidate]."""
    if kind in ("near", "far"):
        dx, dy = _pair_gaps(s, t)
        g = np.hypot(dx, dy) if metric == "euclidean" else np.maximum(dx, dy)
        if kind == "near":
            return (g > prm["near_min"] + EPS) & (g < prm["near_max"] - EPS)
        return g >= prm["far_min"] - EPS
    if kind == "center aligned":
        tol = prm["align_tolerance"] + EPS
        return (np.abs(s.x[:, None] - t.x[None, :]) <= tol) | (np.abs(s.y[:, None] - t.y[None, :]) <= tol)
    if kind == "face to":
        vx = t.x[None, :] - s.x[:, None]
        vy = t.y[None, :] - s.y[:, None]
        fx = np.array([FACING[y][0] for y in s.yaw])[:, None]
        fy = np.array([FACING[y][1] for y in s.yaw])[:, None]
        lon = vx * fx + vy * fy
        lat = vx * fy - vy * fx
        # angle between facing and direction to target within the tolerance
        ang = np.degrees(np.arctan2(np.abs(lat), lon))
        return (lon > EPS) & (ang <= prm["face_tolerance"] + 1e-7)
    if kind in ("in front of", "side of"):
        ux = s.x[:, None] - t.x[None, :]
        uy = s.y[:, None] - t.y[None, :]
        fx = np.array([FACING[y][0] for y in t.yaw])[None, :]
        fy = np.array([FACING[y][1] for y in t.yaw])[None, :]
        lon = ux * fx + uy * fy
        lat = ux * fy - uy * fx
        if kind == "in front of":
            return (lon > t.d / 2 + EPS) & (np.abs(lat) <= t.w / 2 + prm["front_lateral_slack"] + EPS)
        return (np.abs(lat) >= t.w / 2 - EPS) & (np.abs(lon) <= t.d / 2 + EPS)
    raise ValueError(kind)


DEFAULT_PARAMS = dict(near_min=0.5, near_max=1.5, far_min=1.5, edge_max_wall_gap=0.3,
                      middle_min_wall_gap=0.5, face_tolerance=45.0, align_tolerance=0.05,
                      front_lateral_slack=0.5)


# ---------------------------------------------------------------- instances

@dataclass
class Instance:
    """room (x0, y0, x1, y1); objects [(id, w, d)]; specs [(id, global, [(kind, target)])]."""

    room: tuple
    objects: list
    specs: list
    step: float = 0.5

    def graph_text(self) -> str:
        lines = []
        for oid, glob, rels in self.specs:
            lines.append(" | ".join([oid, glob] + [f"{k}, {t}" for k, t in rels]))
        return "\n".join(lines) + "\n"


RELATION_KINDS = ("near", "far", "in front of", "side of", "center aligned", "face to")


def random_instance(rng: np.random.Generator, max_objects: int = 3, max_side: float = 3.0) -> Instance:
    W = float(rng.choice(np.arange(2.0, max_side + 0.01, 0.5)))
    D = float(rng.choice(np.arange(2.0, max_side + 0.01, 0.5)))
    n = int(rng.integers(1, max_objects + 1))
    objects, specs = [], []
    for i in range(n):
        oid = f"obj-{i}"
        objects.append((oid, float(rng.choice([0.5, 1.0])), float(rng.choice([0.5, 1.0, 1.5]))))
        glob = str(rng.choice(["edge", "middle"]))
        rels = []
        if i > 0:
            for _ in range(int(rng.integers(0, 3))):
                rels.append((str(rng.choice(RELATION_KINDS)), f"obj-{int(rng.integers(0, i))}"))
        specs.append((oid, glob, rels))
    return Instance((0.0, 0.0, W, D), objects, specs)


# ---------------------------------------------------------------- exhaustive search

def _tables(inst: Instance, prm, metric: str, hard_kinds=()):
    """Candidates, unary scores, pair scores and pair feasibility masks."""
    ids = [o[0] for o in inst.objects]
    cand = {oid: candidates(inst.room, w, d, inst.step) for oid, w, d in inst.objects}
    un = {oid: np.zeros(len(cand[oid]), dtype=np.int64) for oid in ids}
    un_ok = {oid: np.ones(len(cand[oid]), dtype=bool) for oid in ids}
    pair = {}
    pair_ok = {}
    for a, b in itertools.combinations(range(len(ids)), 2):
        pair_ok[(a, b)] = ~overlap_matrix(cand[ids[a]], cand[ids[b]])
        pair[(a, b)] = np.zeros_like(pair_ok[(a, b)], dtype=np.int64)
    for oid, glob, rels in inst.specs:
        g = unary(glob, cand[oid], inst.room, prm)
        if glob in hard_kinds:
            un_ok[oid] &= g
        else:
            un[oid] += g
        i = ids.index(oid)
        for kind, tgt in rels:
            j = ids.index(tgt)
            m = relation(kind, cand[oid], cand[tgt], prm, metric)  # [i-cand, j-cand]
            key, mat = ((j, i), m.T) if j < i else ((i, j), m)
            if kind in hard_kinds:
                pair_ok[key] &= mat
            else:
                pair[key] += mat
    return ids, cand, un, un_ok, pair, pair_ok


def optimum(inst: Instance, prm=DEFAULT_PARAMS, metric: str = "euclidean", hard_kinds=(),
            scored_kinds=None):
    """Best total over all complete hard-feasible assignments, or None.

    With ``hard_kinds`` the listed constraint kinds become feasibility
    conditions instead of score terms; ``scored_kinds`` limits what counts.
    """
    if scored_kinds is not None:
        inst = Instance(inst.room, inst.objects,
                        [(o, g, [(k, t) for k, t in rels if k in scored_kinds or k in hard_kinds])
                         for o, g, rels in inst.specs], inst.step)
    ids, cand, un, un_ok, pair, pair_ok = _tables(inst, prm, metric, hard_kinds)
    if scored_kinds is not None:
        for oid, glob, _ in inst.specs:
            if glob not in scored_kinds and glob not in hard_kinds:
                un[oid] = np.zeros_like(un[oid])
    n = len(ids)
    if any(len(cand[i]) == 0 for i in ids):
        return None
    # broadcast total score over the full product grid
    total = None
    ok = None
    for i, oid in enumerate(ids):
        shape = [1] * n
        shape[i] = len(cand[oid])
        u = un[oid].reshape(shape)
        uo = un_ok[oid].reshape(shape)
        total = u if total is None else total + u
        ok = uo if ok is None else ok & uo
    for (a, b), mat in pair.items():
        shape = [1] * n
        shape[a], shape[b] = mat.shape
        total = total + mat.reshape(shape)
        ok = ok & pair_ok[(a, b)].reshape(shape)
    ok = np.broadcast_to(ok, np.broadcast_shapes(ok.shape, np.shape(total)))
    total = np.broadcast_to(total, ok.shape)
    if not ok.any():
        return None
    return int(total[ok].max())


def milp_optimum(inst: Instance, prm=DEFAULT_PARAMS):
    """Optimum of the MILP reading: every non-distance constraint is hard,
    near/far earn 1 each, gaps measured per axis (Chebyshev)."""
    hard = ("edge", "middle", "in front of", "side of", "center aligned", "face to")
    return optimum(inst, prm, "chebyshev", hard_kinds=hard, scored_kinds=("near", "far"))


# ---------------------------------------------------------------- intervals

def subtract_intervals(base: tuple[float, float], cuts: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """[base] minus the union of cuts, as sorted disjoint positive-length pieces."""
    pieces = [base]
    for c0, c1 in cuts:
        nxt = []
        for p0, p1 in pieces:
            if c1 <= p0 + EPS or c0 >= p1 - EPS:
                nxt.append((p0, p1))
                continue
            if c0 > p0 + EPS:
                nxt.append((p0, c0))
            if c1 < p1 - EPS:
                nxt.append((c1, p1))
        pieces = nxt
    return sorted(pieces)


def euclid_gap(a, b) -> float:
    """Distance between closed boxes (x0, y0, x1, y1)."""
    dx = max(0.0, b[0] - a[2], a[0] - b[2])
    dy = max(0.0, b[1] - a[3], a[1] - b[3])
    return math.hypot(dx, dy)

"""Mixed-integer linear encoding of the floor layout problem.

Each object gets continuous ``x, y`` (its center) and binaries ``r90, r180``
(yaw = 90 * r90 + 180 * r180). With w, d fixed, the world half extents are
linear in ``r90``::

    hx = w/2 + r90 * (d - w)/2        hy = d/2 + r90 * (w - d)/2

Everything except near/far is a hard row. Disjunctions (non-overlap, edge,
center alignment, side-of, distance lower bounds) use auxiliary binaries
with big-M relaxation; rotation-dependent relations gate one row set per
rotation case with ``M * (mismatch of r90, r180)``. Near/far each own an
indicator binary that earns 1 in the objective when its rows hold.

Distances in this model are per-axis (Chebyshev) surface gaps, the only
linear-representable reading; the floor solvers measure Euclidean gaps.

``solve_bundled`` is an exact search over the position grid, standing in for
a commercial solver on desk-sized instances.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

import numpy as np

from .constraints import Kind, PredicateParams
from .errors import BudgetExceeded, Infeasible, UnsupportedConstraint
from .geometry import Footprint, Rect
from .layout import Layout, ObjectDims, PlacementProblem, object_candidates, score_layout

# strictness margin for "<" / ">" rows; it must exceed the row tolerance,
# otherwise a gap of exactly near_min would pass the "> near_min" row
STRICT = 1e-4
RESIDUAL_TOL = 1e-6


class LinExpr:
    """Sparse linear expression: ``sum(coef * var) + const``."""

    __slots__ = ("terms", "const")

    def __init__(self, terms: dict[str, float] | None = None, const: float = 0.0):
        self.terms = dict(terms or {})
        self.const = float(const)

    @classmethod
    def var(cls, name: str, coef: float = 1.0) -> "LinExpr":
        return cls({name: coef})

    def __add__(self, other):
        if not isinstance(other, LinExpr):
            return LinExpr(self.terms, self.const + other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0.0) + v
        return LinExpr(terms, self.const + other.const)

    __radd__ = __add__

    def __neg__(self):
        return LinExpr({k: -v for k, v in self.terms.items()}, -self.const)

    def __sub__(self, other):
        return self + (-other if isinstance(other, LinExpr) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, k: float):
        return LinExpr({n: v * k for n, v in self.terms.items()}, self.const * k)

    __rmul__ = __mul__


@dataclass
class Var:
    name: str
    kind: str  # "continuous" | "binary"
    lb: float = 0.0
    ub: float = 1.0


@dataclass
class Row:
    name: str
    coeffs: dict[str, float]
    sense: str  # "<=", ">=", "="
    rhs: float


@dataclass(frozen=True)
class BigMParams:
    M: float

    @classmethod
    def for_problem(cls, p: PlacementProblem) -> "BigMParams":
        room = p.room
        ext = max((max(o.width, o.depth) for o in p.objects), default=0.0)
        slope = max(1.0, p.params.face_slope)
        return cls((1 + slope) * (room.width + room.depth) + 2 * ext + p.params.far_min + 1.0)


@dataclass
class MilpModel:
    variables: dict[str, Var] = field(default_factory=dict)
    rows: list[Row] = field(default_factory=list)
    objective: dict[str, float] = field(default_factory=dict)
    # metadata kept for the bundled solver; not part of the LP text
    room: Rect | None = None
    objects: tuple[ObjectDims, ...] = ()
    object_vars: dict[str, tuple[str, str, str, str]] = field(default_factory=dict)
    params: PredicateParams | None = None
    big_m: float = 0.0

    def add_var(self, name: str, kind: str, lb: float = 0.0, ub: float = 1.0) -> str:
        if name in self.variables:
            raise ValueError(f"duplicate variable {name}")
        self.variables[name] = Var(name, kind, lb, ub)
        return name

    def add_row(self, tag: str, expr: LinExpr, sense: str, rhs: float) -> Row:
        coeffs = {k: v for k, v in expr.terms.items() if v != 0.0}
        if not coeffs:
            raise ValueError(f"row {tag} has no variables")
        row = Row(f"c{len(self.rows)}_{tag}", coeffs, sense, rhs - expr.const)
        self.rows.append(row)
        return row

    @property
    def binaries(self) -> list[str]:
        return [v.name for v in self.variables.values() if v.kind == "binary"]

    @property
    def continuous(self) -> list[str]:
        return [v.name for v in self.variables.values() if v.kind == "continuous"]

    def aux_binaries(self) -> list[str]:
        rot = {n for vs in self.object_vars.values() for n in vs[2:]}
        return [b for b in self.binaries if b not in rot]


# ---------------------------------------------------------------- encoding

_YAW_CASES = {(0, 0): 0, (1, 0): 90, (0, 1): 180, (1, 1): 270}
_FACING = {0: (0.0, 1.0), 90: (1.0, 0.0), 180: (0.0, -1.0), 270: (-1.0, 0.0)}


def yaw_from_bits(r90: int, r180: int) -> int:
    return _YAW_CASES[(int(r90), int(r180))]


def bits_from_yaw(yaw: int) -> tuple[int, int]:
    for bits, y in _YAW_CASES.items():
        if y == yaw:
            return bits
    raise ValueError(f"yaw {yaw} is not a multiple of 90")


def _sanitize(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9]", "_", text)


def encode(p: PlacementProblem, big_m: BigMParams | None = None) -> MilpModel:
    params = p.params.with_metric("chebyshev")
    M = (big_m or BigMParams.for_problem(p)).M
    room = p.room
    m = MilpModel(room=room, objects=p.objects, params=params, big_m=M)

    for spec in p.graph.specs:
        for c in spec.constraints:
            if c.kind.out_of_plane:
                raise UnsupportedConstraint(f"{spec.object_id}: {c.kind.value} cannot be encoded")

    dims: dict[str, ObjectDims] = {}
    tag: dict[str, str] = {}
    for i, o in enumerate(p.objects):
        t = f"o{i}_{_sanitize(o.id)}"
        tag[o.id] = t
        dims[o.id] = o
        x = m.add_var(f"x_{t}", "continuous", room.min.x, room.max.x)
        y = m.add_var(f"y_{t}", "continuous", room.min.y, room.max.y)
        r90 = m.add_var(f"r90_{t}", "binary")
        r180 = m.add_var(f"r180_{t}", "binary")
        m.object_vars[o.id] = (x, y, r90, r180)

    def X(oid):
        return LinExpr.var(m.object_vars[oid][0])

    def Y(oid):
        return LinExpr.var(m.object_vars[oid][1])

    def HX(oid):
        o = dims[oid]
        return LinExpr({m.object_vars[oid][2]: (o.depth - o.width) / 2}, o.width / 2)

    def HY(oid):
        o = dims[oid]
        return LinExpr({m.object_vars[oid][2]: (o.width - o.depth) / 2}, o.depth / 2)

    def mismatch(oid, bits):
        r90, r180 = LinExpr.var(m.object_vars[oid][2]), LinExpr.var(m.object_vars[oid][3])
        a = r90 if bits[0] == 0 else 1 - r90
        b = r180 if bits[1] == 0 else 1 - r180
        return a + b

    # containment
    for o in p.objects:
        t = tag[o.id]
        m.add_row(f"in_{t}", X(o.id) - HX(o.id), ">=", room.min.x)
        m.add_row(f"in_{t}", X(o.id) + HX(o.id), "<=", room.max.x)
        m.add_row(f"in_{t}", Y(o.id) - HY(o.id), ">=", room.min.y)
        m.add_row(f"in_{t}", Y(o.id) + HY(o.id), "<=", room.max.y)

    # pairwise non-overlap: i left of j, right of, below, above
    for a, b in itertools.combinations([o.id for o in p.objects], 2):
        pt = f"{tag[a]}_{tag[b]}"
        sides = [
            X(a) + HX(a) - X(b) + HX(b),
            X(b) + HX(b) - X(a) + HX(a),
            Y(a) + HY(a) - Y(b) + HY(b),
            Y(b) + HY(b) - Y(a) + HY(a),
        ]
        bins = []
        for k, expr in enumerate(sides):
            z = m.add_var(f"sep{k}_{pt}", "binary")
            bins.append(LinExpr.var(z))
            m.add_row(f"sep_{pt}", expr + M * LinExpr.var(z), "<=", M)
        m.add_row(f"sep_{pt}", sum(bins, LinExpr()), ">=", 1)

    def wall_gaps(oid):
        return [
            X(oid) - HX(oid) - room.min.x,
            room.max.x - X(oid) - HX(oid),
            Y(oid) - HY(oid) - room.min.y,
            room.max.y - Y(oid) - HY(oid),
        ]

    def separations(s, t):
        """Signed axis separations; the per-axis gap is max(0, *these)."""
        return [
            X(t) - HX(t) - X(s) - HX(s),
            X(s) - HX(s) - X(t) - HX(t),
            Y(t) - HY(t) - Y(s) - HY(s),
            Y(s) - HY(s) - Y(t) - HY(t),
        ]

    n_rel: dict[str, int] = {}
    for spec in p.graph.specs:
        s = spec.object_id
        ts = tag[s]
        for c in spec.constraints:
            k = n_rel[s] = n_rel.get(s, -1) + 1
            ct = f"{ts}_{k}"
            kind = c.kind
            if kind is Kind.EDGE:
                es = []
                for w, gap in enumerate(wall_gaps(s)):
                    e = m.add_var(f"edge{w}_{ct}", "binary")
                    es.append(LinExpr.var(e))
                    m.add_row(f"edge_{ct}", gap + M * LinExpr.var(e), "<=", params.edge_max_wall_gap + M)
                m.add_row(f"edge_{ct}", sum(es, LinExpr()), ">=", 1)
            elif kind is Kind.MIDDLE:
                for gap in wall_gaps(s):
                    m.add_row(f"middle_{ct}", gap, ">=", params.middle_min_wall_gap)
            elif kind is Kind.CENTER_ALIGNED:
                t = c.target
                a = LinExpr.var(m.add_var(f"align_{ct}", "binary"))
                tol = params.align_tolerance
                m.add_row(f"align_{ct}", X(s) - X(t) + M * a, "<=", tol + M)
                m.add_row(f"align_{ct}", X(t) - X(s) + M * a, "<=", tol + M)
                m.add_row(f"align_{ct}", Y(s) - Y(t) - M * a, "<=", tol)
                m.add_row(f"align_{ct}", Y(t) - Y(s) - M * a, "<=", tol)
            elif kind is Kind.FACE_TO:
                t = c.target
                slope = params.face_slope
                for bits, yaw in _YAW_CASES.items():
                    fx, fy = _FACING[yaw]
                    vx, vy = X(t) - X(s), Y(t) - Y(s)
                    lon = vx * fx + vy * fy
                    lat = vx * fy - vy * fx
                    mis = M * mismatch(s, bits)
                    m.add_row(f"face_{ct}", slope * lon - lat + mis, ">=", 0)
                    m.add_row(f"face_{ct}", slope * lon + lat + mis, ">=", 0)
            elif kind is Kind.IN_FRONT_OF:
                t = c.target
                o = dims[t]
                for bits, yaw in _YAW_CASES.items():
                    fx, fy = _FACING[yaw]
                    ux, uy = X(s) - X(t), Y(s) - Y(t)
                    lon = ux * fx + uy * fy
                    lat = ux * fy - uy * fx
                    mis = M * mismatch(t, bits)
                    m.add_row(f"front_{ct}", lon + mis, ">=", o.depth / 2 + STRICT)
                    m.add_row(f"front_{ct}", lat - mis, "<=", o.width / 2 + params.front_lateral_slack)
                    m.add_row(f"front_{ct}", -lat - mis, "<=", o.width / 2 + params.front_lateral_slack)
            elif kind is Kind.SIDE_OF:
                t = c.target
                o = dims[t]
                b = LinExpr.var(m.add_var(f"side_{ct}", "binary"))
                for bits, yaw in _YAW_CASES.items():
                    fx, fy = _FACING[yaw]
                    ux, uy = X(s) - X(t), Y(s) - Y(t)
                    lon = ux * fx + uy * fy
                    lat = ux * fy - uy * fx
                    mis = M * mismatch(t, bits)
                    m.add_row(f"side_{ct}", lat - M * b + mis, ">=", o.width / 2 - M)
                    m.add_row(f"side_{ct}", -lat + M * b + mis, ">=", o.width / 2)
                    m.add_row(f"side_{ct}", lon - mis, "<=", o.depth / 2)
                    m.add_row(f"side_{ct}", -lon - mis, "<=", o.depth / 2)
            elif kind is Kind.NEAR:
                t = c.target
                ind = m.add_var(f"near_{ct}", "binary")
                n = LinExpr.var(ind)
                m.objective[ind] = 1.0
                qs = []
                for k2, sep in enumerate(separations(s, t)):
                    q = LinExpr.var(m.add_var(f"nearq{k2}_{ct}", "binary"))
                    qs.append(q)
                    m.add_row(f"near_{ct}", sep - M * q, ">=", params.near_min + STRICT - M)
                    m.add_row(f"near_{ct}", sep + M * n, "<=", params.near_max - STRICT + M)
                m.add_row(f"near_{ct}", sum(qs, LinExpr()) - n, ">=", 0)
            elif kind is Kind.FAR:
                t = c.target
                ind = m.add_var(f"far_{ct}", "binary")
                m.objective[ind] = 1.0
                qs = []
                for k2, sep in enumerate(separations(s, t)):
                    q = LinExpr.var(m.add_var(f"farq{k2}_{ct}", "binary"))
                    qs.append(q)
                    m.add_row(f"far_{ct}", sep - M * q, ">=", params.far_min - M)
                m.add_row(f"far_{ct}", sum(qs, LinExpr()) - LinExpr.var(ind), ">=", 0)
            else:  # pragma: no cover - guarded above
                raise UnsupportedConstraint(kind.value)
    return m


# ---------------------------------------------------------------- LP format

def _fmt(v: float) -> str:
    v = float(v)
    if v == 0:
        return "0"
    return "%.12g" % v


def _terms(coeffs: dict[str, float]) -> str:
    parts = []
    for name, c in coeffs.items():
        sign = "-" if c < 0 else "+"
        parts.append(f"{sign} {_fmt(abs(c))} {name}")
    return " ".join(parts)


def export_lp(m: MilpModel) -> str:
    """CPLEX-LP text: Maximize / Subject To / Bounds / Binary / End."""
    out = ["\\ roomgen layout model", "Maximize"]
    obj = _terms(m.objective)
    out.append(f" obj: {obj}" if obj else " obj:")
    out.append("Subject To")
    for r in m.rows:
        out.append(f" {r.name}: {_terms(r.coeffs)} {r.sense} {_fmt(r.rhs)}")
    out.append("Bounds")
    for v in m.variables.values():
        if v.kind == "continuous":
            out.append(f" {_fmt(v.lb)} <= {v.name} <= {_fmt(v.ub)}")
    out.append("Binary")
    for v in m.variables.values():
        if v.kind == "binary":
            out.append(f" {v.name}")
    out.append("End")
    return "\n".join(out) + "\n"


_TERM = re.compile(r"([+-])\s*([0-9.eE+-]+)\s+([A-Za-z_][A-Za-z0-9_]*)")


def _parse_terms(text: str) -> dict[str, float]:
    coeffs: dict[str, float] = {}
    for sign, num, name in _TERM.findall(text):
        coeffs[name] = float(num) * (-1 if sign == "-" else 1)
    return coeffs


def parse_lp(text: str) -> MilpModel:
    """Read back the subset of LP written by :func:`export_lp`."""
    m = MilpModel()
    section = None
    pending_vars: list[str] = []
    bounds: dict[str, tuple[float, float]] = {}
    binaries: list[str] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        low = line.lower()
        if low in ("maximize", "subject to", "bounds", "binary", "end"):
            section = low
            continue
        if section == "maximize":
            _, _, body = line.partition(":")
            m.objective = _parse_terms(body)
            pending_vars.extend(m.objective)
        elif section == "subject to":
            name, _, body = line.partition(":")
            mt = re.match(r"(.*?)\s*(<=|>=|=)\s*(\S+)$", body.strip())
            if not mt:
                raise ValueError(f"cannot parse row {line!r}")
            coeffs = _parse_terms(" " + mt[1] if mt[1].lstrip()[:1] in "+-" else " + " + mt[1])
            m.rows.append(Row(name.strip(), coeffs, mt[2], float(mt[3])))
            pending_vars.extend(coeffs)
        elif section == "bounds":
            mt = re.match(r"(\S+)\s*<=\s*(\S+)\s*<=\s*(\S+)$", line)
            if not mt:
                raise ValueError(f"cannot parse bound {line!r}")
            bounds[mt[2]] = (float(mt[1]), float(mt[3]))
            pending_vars.append(mt[2])
        elif section == "binary":
            binaries.extend(line.split())
            pending_vars.extend(line.split())
    # declaration order: continuous from bounds first seen, binaries in listed order
    order = list(dict.fromkeys(list(bounds) + binaries + pending_vars))
    for name in order:
        if name in binaries:
            m.variables[name] = Var(name, "binary")
        else:
            lb, ub = bounds.get(name, (0.0, float("inf")))
            m.variables[name] = Var(name, "continuous", lb, ub)
    # keep continuous/binary interleaving stable for re-export
    m.variables = {n: m.variables[n] for n in order}
    return m


# ---------------------------------------------------------------- evaluation

def row_residual(row: Row, values: dict[str, float]) -> float:
    """Amount by which ``row`` is violated (0 when satisfied)."""
    lhs = sum(c * values[n] for n, c in row.coeffs.items())
    if row.sense == "<=":
        return max(0.0, lhs - row.rhs)
    if row.sense == ">=":
        return max(0.0, row.rhs - lhs)
    return abs(lhs - row.rhs)


def violated_rows(m: MilpModel, values: dict[str, float], tol: float = RESIDUAL_TOL) -> list[str]:
    bad = [r.name for r in m.rows if row_residual(r, values) > tol]
    for v in m.variables.values():
        x = values[v.name]
        if v.kind == "binary" and x not in (0, 1):
            bad.append(f"{v.name}:not_binary")
        elif v.kind == "continuous" and not (v.lb - tol <= x <= v.ub + tol):
            bad.append(f"{v.name}:bounds")
    return bad


@dataclass
class _Groups:
    plain: list[Row]
    groups: list[tuple[list[str], list[Row]]]


def _aux_groups(m: MilpModel) -> _Groups:
    aux = set(m.aux_binaries())
    parent = {a: a for a in aux}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for r in m.rows:
        names = [n for n in r.coeffs if n in aux]
        for a, b in zip(names, names[1:]):
            parent[find(a)] = find(b)
    comps: dict[str, list[str]] = {}
    for a in m.aux_binaries():
        comps.setdefault(find(a), []).append(a)
    rows_of: dict[str, list[Row]] = {k: [] for k in comps}
    plain = []
    for r in m.rows:
        names = [n for n in r.coeffs if n in aux]
        if names:
            rows_of[find(names[0])].append(r)
        else:
            plain.append(r)
    return _Groups(plain, [(comps[k], rows_of[k]) for k in comps])


def _lhs(row: Row, vals: dict, n: int, skip: frozenset = frozenset()) -> np.ndarray:
    lhs = np.zeros(n)
    for name, c in row.coeffs.items():
        if name not in skip:
            lhs = lhs + c * vals[name]
    return lhs


def _holds(lhs, sense: str, rhs: float):
    if sense == "<=":
        return lhs <= rhs + RESIDUAL_TOL
    if sense == ">=":
        return lhs >= rhs - RESIDUAL_TOL
    return np.abs(lhs - rhs) <= RESIDUAL_TOL


def _row_ok(row: Row, vals: dict, n: int) -> np.ndarray:
    return _holds(_lhs(row, vals, n), row.sense, row.rhs)


def _group_best(names: list[str], rows: list[Row], vals: dict, n: int,
                objective: dict[str, float]) -> tuple[np.ndarray, np.ndarray]:
    """Best objective contribution of one aux group per combination.

    All 2^m aux assignments are checked at once; returns (best gain or -inf,
    index of the winning assignment in ``itertools.product`` order).
    """
    bits = np.array(list(itertools.product((0.0, 1.0), repeat=len(names))))
    aux = frozenset(names)
    ok = np.ones((n, len(bits)), dtype=bool)
    for r in rows:
        pos = _lhs(r, vals, n, aux)
        coef = np.array([r.coeffs.get(nm, 0.0) for nm in names])
        ok &= _holds(pos[:, None] + (bits @ coef)[None, :], r.sense, r.rhs)
    gain = bits @ np.array([objective.get(nm, 0.0) for nm in names])
    scored = np.where(ok, gain[None, :], -np.inf)
    # stable argmax: first assignment among equal gains
    choice = np.argmax(scored, axis=1)
    best = scored[np.arange(n), choice]
    return best, np.where(np.isfinite(best), choice, -1)


def _object_index(m: MilpModel) -> dict[str, int]:
    idx = {}
    for i, o in enumerate(m.objects):
        for name in m.object_vars[o.id]:
            idx[name] = i
    return idx


def solve_bundled(m: MilpModel, grid_step: float = 0.25,
                  max_evaluations: int = 20_000_000) -> Layout:
    """Exact search over the position grid.

    Objects are added one at a time; after each addition every row and aux
    group whose positional variables are all assigned is checked, aux groups
    by enumerating their binaries. Surviving partial assignments carry the
    objective earned so far. Raises :class:`Infeasible` when nothing survives
    and :class:`BudgetExceeded` past ``max_evaluations`` combinations.
    """
    if m.room is None:
        raise ValueError("model carries no room metadata; build it with encode()")
    if not m.objects:
        return Layout({}, 0, 0, True, (), ("milp_objective:0",))
    obj_of = _object_index(m)
    g = _aux_groups(m)

    def ready(rows):
        return max((obj_of[n] for r in rows for n in r.coeffs if n in obj_of), default=0)

    plain_at: dict[int, list[Row]] = {}
    for r in g.plain:
        plain_at.setdefault(ready([r]), []).append(r)
    groups_at: dict[int, list] = {}
    # hard groups (no objective weight) before rewarded ones, smaller first
    for names, rows in sorted(g.groups, key=lambda nr: (
            any(m.objective.get(a) for a in nr[0]), len(nr[0]), len(nr[1]))):
        groups_at.setdefault(ready(rows), []).append((names, rows))

    cands = []
    for o in m.objects:
        c = object_candidates(m.room, o.width, o.depth, grid_step)
        r90 = np.isin(c.yaw, (90, 270)).astype(float)
        r180 = np.isin(c.yaw, (180, 270)).astype(float)
        cands.append((c, r90, r180))

    assign = np.zeros((1, 0), dtype=np.int64)
    score = np.zeros(1)
    used = 0
    chunk = 200_000
    for i, (c, r90, r180) in enumerate(cands):
        P = len(c)
        total = len(assign) * P
        used += total
        if used > max_evaluations:
            raise BudgetExceeded(f"grid search exceeded {max_evaluations} combinations")
        keep_a, keep_s = [], []
        rows_per_chunk = max(1, chunk // max(P, 1))
        for start in range(0, len(assign), rows_per_chunk):
            a_blk = assign[start:start + rows_per_chunk]
            s_blk = score[start:start + rows_per_chunk]
            A = np.repeat(a_blk, P, axis=0)
            new = np.tile(np.arange(P), len(a_blk))
            A = np.concatenate([A, new[:, None]], axis=1)
            S = np.repeat(s_blk, P)
            vals = {}
            for j in range(i + 1):
                cj, r90j, r180j = cands[j]
                x, y, b90, b180 = m.object_vars[m.objects[j].id]
                k = A[:, j]
                vals[x], vals[y], vals[b90], vals[b180] = cj.cx[k], cj.cy[k], r90j[k], r180j[k]
            # cheapest checks first; compress survivors after each one
            for r in plain_at.get(i, []):
                ok = _row_ok(r, vals, len(A))
                if not ok.all():
                    A, S = A[ok], S[ok]
                    vals = {k: v[ok] for k, v in vals.items()}
            for names, rows in groups_at.get(i, []):
                if len(A) == 0:
                    break
                best, _ = _group_best(names, rows, vals, len(A), m.objective)
                ok = np.isfinite(best)
                S = S + np.where(ok, best, 0.0)
                if not ok.all():
                    A, S = A[ok], S[ok]
                    vals = {k: v[ok] for k, v in vals.items()}
            keep_a.append(A)
            keep_s.append(S)
        assign = np.concatenate(keep_a) if keep_a else np.zeros((0, i + 1), dtype=np.int64)
        score = np.concatenate(keep_s) if keep_s else np.zeros(0)
        if len(assign) == 0:
            raise Infeasible("no grid assignment satisfies the hard rows")

    top = np.flatnonzero(score == score.max())
    # lexicographic placement key: objects sorted by id, then (x, y, yaw)
    order = sorted(range(len(m.objects)), key=lambda j: m.objects[j].id)
    keys = []
    for j in reversed(order):
        cj = cands[j][0]
        k = assign[top, j]
        keys.extend([cj.yaw[k], cj.cy[k], cj.cx[k]])
    pick = top[np.lexsort(keys)[0]] if len(top) > 1 else top[0]

    placements = {}
    for j, o in enumerate(m.objects):
        placements[o.id] = cands[j][0].footprint(int(assign[pick, j]))
    layout = Layout(placements, complete=True)
    layout.diagnostics = (f"milp_objective:{_fmt(score[pick])}",)
    layout.milp_objective = float(score[pick])
    return layout


def assignment_values(m: MilpModel, placements: dict[str, Footprint]) -> dict[str, float] | None:
    """Complete variable assignment for fixed placements, maximizing the objective.

    Returns None when no aux-binary assignment makes every row hold.
    """
    vals: dict[str, float] = {}
    for o in m.objects:
        f = placements[o.id]
        x, y, b90, b180 = m.object_vars[o.id]
        bits = bits_from_yaw(f.yaw)
        vals.update({x: f.center.x, y: f.center.y, b90: float(bits[0]), b180: float(bits[1])})
    g = _aux_groups(m)
    arr = {k: np.array([v]) for k, v in vals.items()}
    for r in g.plain:
        if not _row_ok(r, arr, 1)[0]:
            return None
    for names, rows in g.groups:
        best, choice = _group_best(names, rows, arr, 1, m.objective)
        if not np.isfinite(best[0]):
            return None
        bits = list(itertools.product((0.0, 1.0), repeat=len(names)))[int(choice[0])]
        vals.update(zip(names, bits))
    return vals


def objective_value(m: MilpModel, values: dict[str, float]) -> float:
    return sum(c * values[n] for n, c in m.objective.items())


def solve_problem(p: PlacementProblem, **kw) -> Layout:
    """Encode and solve; the returned layout is scored with the floor predicates."""
    m = encode(p)
    layout = solve_bundled(m, p.grid_step, **kw)
    layout.score, layout.total = score_layout(p.graph, layout.placements, p.room, p.params)
    return layout

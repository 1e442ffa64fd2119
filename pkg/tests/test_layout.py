import json

import numpy as np
import pytest
from helpers import to_problem
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import Instance, optimum, random_instance

from roomgen.constraints import parse_scene_graph
from roomgen.errors import EmptyRoom, MalformedLine
from roomgen.geometry import Footprint, Point2, Rect, footprint_aabb
from roomgen.layout import (
    DROP_PENALTY,
    Layout,
    ObjectDims,
    PlacementProblem,
    apply_absolute,
    footprint_from_dict,
    hard_violations,
    layout_from_dict,
    layout_to_dict,
    load_problem_files,
    parse_room_text,
    placement_order,
    problem_from_dict,
    problem_to_dict,
    solve_dfs,
    solve_edge,
    solve_random,
)

ROOM4 = Rect.from_bounds(0, 0, 4, 4)


def problem(objects, graph_text, room=ROOM4, **kw):
    return PlacementProblem(room, tuple(ObjectDims(*o) for o in objects), parse_scene_graph(graph_text), **kw)


def assert_hard_ok(p, layout):
    oob, pairs = hard_violations(p.room, layout.placements)
    assert oob == [] and pairs == []


def test_single_edge_object_flush():
    p = problem([("box-0", 1, 1)], "box-0 | edge\n", grid_step=0.5)
    out = solve_dfs(p)
    assert out.score == 1 and out.total == 1 and out.complete
    b = footprint_aabb(out.placements["box-0"])
    gap = min(b.min.x, b.min.y, 4 - b.max.x, 4 - b.max.y)
    assert gap <= 0.3


def test_object_larger_than_room_is_dropped():
    p = problem([("slab-0", 5, 5)], "slab-0 | edge\n")
    out = solve_dfs(p)
    assert "slab-0" not in out.placements
    assert not out.complete and out.dropped == ("slab-0",)
    assert "object_larger_than_room:slab-0" in out.diagnostics
    assert out.objective == -DROP_PENALTY


def test_empty_graph_raises():
    with pytest.raises(EmptyRoom):
        solve_dfs(problem([], ""))


def test_drop_penalty_prefers_complete_layouts():
    full = Layout({}, score=3, total=5)
    partial = Layout({}, score=5, total=5, complete=False, dropped=("x",))
    assert full.objective > partial.objective


def test_bedroom_fixture(layouts_dir):
    d = layouts_dir / "bedroom"
    p = load_problem_files(d / "room.txt", d / "graph.txt")
    assert placement_order(p)[0].object_id == "bed-0"
    out = solve_dfs(p, seed=0)
    assert out.complete
    assert_hard_ok(p, out)
    assert out.satisfaction >= 0.8


def test_placement_order_keeps_dependencies():
    p = problem([("a", 2, 1), ("b", 0.5, 0.5), ("c", 1, 1), ("d", 1.5, 1)],
                "a | edge\nb | edge | near, a\nc | edge | near, a\nd | middle | near, b\n")
    order = [s.object_id for s in placement_order(p)]
    assert order == ["a", "c", "b", "d"]  # c and b share a depth; larger first


@pytest.mark.parametrize("name", ["bedroom", "living_room", "study", "dining_room"])
def test_fixture_baselines_are_collision_free(layouts_dir, name):
    d = layouts_dir / name
    p = load_problem_files(d / "room.txt", d / "graph.txt")
    for solve in (solve_edge, solve_random):
        out = solve(p, seed=3)
        assert_hard_ok(p, out)


def test_edge_walks_the_perimeter():
    p = problem([(f"b-{i}", 1, 1) for i in range(6)], "\n".join(f"b-{i} | edge" for i in range(6)) + "\n")
    out = solve_edge(p)
    assert out.complete
    assert_hard_ok(p, out)
    assert out.score == 6
    yaws = [out.placements[f"b-{i}"].yaw for i in range(6)]
    assert yaws[:4] == [0, 0, 0, 0] and yaws[4] == 270  # south wall fills up, then east


def test_edge_skips_object_that_fits_no_wall():
    p = problem([("long-0", 4.5, 0.5)], "long-0 | edge\n")
    out = solve_edge(p)
    assert out.dropped == ("long-0",)


def test_random_is_seeded():
    p = problem([("a", 1, 1), ("b", 1, 1)], "a | edge\nb | middle | near, a\n")
    assert solve_random(p, seed=5).placements == solve_random(p, seed=5).placements
    assert solve_random(p, seed=5).placements != solve_random(p, seed=6).placements


def test_absolute_reports_violations(layouts_dir):
    d = layouts_dir / "bedroom"
    p = load_problem_files(d / "room.txt", d / "graph.txt")
    raw = json.loads((d / "absolute.json").read_text())
    dims = {o.id: o for o in p.objects}
    given_ = {k: footprint_from_dict(v, dims[k].width, dims[k].depth) for k, v in raw.items()}
    out = apply_absolute(p.room, given_, p.graph)
    assert out.placements == given_  # coordinates taken verbatim
    assert sum(x.startswith("out_of_bounds") for x in out.diagnostics) == 2
    assert sum(x.startswith("collision") for x in out.diagnostics) == 2


def test_absolute_clean_input():
    fp = Footprint(Point2(1, 1), 1, 1, 0)
    assert apply_absolute(ROOM4, {"a": fp}).diagnostics == ()


def test_serialization_round_trip(layouts_dir):
    d = layouts_dir / "study"
    p = load_problem_files(d / "room.txt", d / "graph.txt")
    q = problem_from_dict(json.loads(json.dumps(problem_to_dict(p))))
    assert q == p
    out = solve_edge(p)
    back = layout_from_dict(json.loads(json.dumps(layout_to_dict(out))))
    assert back.placements == out.placements and back.score == out.score and back.dropped == out.dropped


def test_room_text_parsing():
    room, objs = parse_room_text("room | 3, 4  # shorthand\nbed-0 | 1.6 | 2.1\n")
    assert room.bounds() == (0, 0, 3, 4)
    assert objs == [ObjectDims("bed-0", 1.6, 2.1)]
    with pytest.raises(MalformedLine):
        parse_room_text("bed-0 | 1 | 1\n")
    with pytest.raises(MalformedLine):
        parse_room_text("room | 1, 2, 3\n")
    with pytest.raises(MalformedLine):
        parse_room_text("room | 4, 4\nbed-0 | wide | 1\n")


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1))
def test_dfs_matches_exhaustive_oracle(seed):
    inst = random_instance(np.random.default_rng(seed))
    out = solve_dfs(to_problem(inst))
    best = optimum(inst)
    if best is None:
        assert not out.complete
    else:
        assert out.complete and out.score == best
    assert_hard_ok(to_problem(inst), out)


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1), st.integers(0, 100))
def test_dfs_is_deterministic(seed, solver_seed):
    p = to_problem(random_instance(np.random.default_rng(seed)), max_nodes=2000)
    a, b = solve_dfs(p, seed=solver_seed), solve_dfs(p, seed=solver_seed)
    assert a.placements == b.placements and a.score == b.score


@settings(max_examples=20)
@given(st.integers(0, 2**32 - 1))
def test_removing_a_soft_constraint_never_adds_violations(seed):
    inst = random_instance(np.random.default_rng(seed))
    rels = [(i, j) for i, (_, _, r) in enumerate(inst.specs) for j in range(len(r))]
    if not rels:
        return
    i, j = rels[seed % len(rels)]
    specs = [(o, g, [rr for k, rr in enumerate(r) if (n, k) != (i, j)]) for n, (o, g, r) in enumerate(inst.specs)]
    reduced = Instance(inst.room, inst.objects, specs, inst.step)
    full, less = solve_dfs(to_problem(inst)), solve_dfs(to_problem(reduced))
    if full.complete:
        assert less.total - less.score <= full.total - full.score


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["dfs", "edge", "random"]))
def test_every_strategy_respects_hard_constraints(seed, strategy):
    rng = np.random.default_rng(seed)
    W, D = float(rng.uniform(3, 8)), float(rng.uniform(3, 8))
    n = int(rng.integers(2, 7))
    objs = [(f"o-{k}", float(rng.uniform(0.3, 2.0)), float(rng.uniform(0.3, 1.5))) for k in range(n)]
    text = "o-0 | edge\n" + "".join(f"o-{k} | edge | near, o-{k - 1}\n" for k in range(1, n))
    p = problem(objs, text, room=Rect.from_bounds(0, 0, W, D), grid_step=0.5, max_candidates=50, max_nodes=5000)
    out = {"dfs": solve_dfs, "edge": solve_edge, "random": solve_random}[strategy](p, seed=seed)
    assert_hard_ok(p, out)
    assert set(out.placements) | set(out.dropped) == {o[0] for o in objs}

import json
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given
from hypothesis import strategies as st

from roomgen.assembly import (
    PlacedObject,
    SceneDocument,
    export_scene,
    parse_scene,
    place_ceiling_object,
    place_wall_object,
    render_svg,
    spawn_small_objects,
)
from roomgen.errors import NoAdjacentWall, OpeningCollision
from roomgen.floorplan import FloorPlan, rect_room
from roomgen.geometry import rect_contains, rects_overlap
from roomgen.openings import DoorSpec, WindowSpec, place_doors, place_windows

ROOM = rect_room("living room", 0, 0, 5, 4)
PLAN = FloorPlan((ROOM,), 3.0)


def sofa(x=2.5, y=0.45, yaw=0):
    return PlacedObject("sofa-0", "sofa_01", ROOM.name, "floor", (x, y, 0.0), yaw, (2.1, 0.9, 0.8))


def test_painting_hangs_above_sofa():
    p = place_wall_object("painting-0", "painting_01", (1.0, 0.03, 0.7), sofa(), 150, ROOM)
    assert p.position == pytest.approx((2.5, 0.015, 1.5))
    assert p.yaw == 0 and p.kind == "wall" and p.parent == "sofa-0"


def test_wall_object_on_east_wall_is_clamped():
    s = PlacedObject("desk-0", "desk_01", ROOM.name, "floor", (4.7, 3.3, 0.0), 270, (1.2, 0.6, 0.75))
    p = place_wall_object("shelf-0", "shelf_01", (1.6, 0.2, 0.3), s, 120, ROOM)
    assert p.yaw == 270
    assert p.position[:2] == pytest.approx((4.9, 3.2))  # centered at 3.3 it would end past the corner


def test_floor_object_away_from_walls():
    with pytest.raises(NoAdjacentWall):
        place_wall_object("painting-0", "painting_01", (1.0, 0.03, 0.7), sofa(2.5, 2.0), 150, ROOM)


def test_wall_object_over_a_window():
    wins = place_windows(PLAN, [WindowSpec(ROOM.name, "south", "hung", (130, 130), 1, 90)])
    with pytest.raises(OpeningCollision):
        place_wall_object("painting-0", "painting_01", (1.0, 0.03, 0.7), sofa(), 150, ROOM, windows=wins)


def test_two_books_on_a_desk():
    desk = PlacedObject("desk-0", "desk_01", ROOM.name, "floor", (2.0, 2.0, 0.0), 0, (1.5, 0.8, 0.75))
    books, diags = spawn_small_objects(desk, [("book-0", "book_01", (0.2, 0.15, 0.03)),
                                              ("book-1", "book_01", (0.2, 0.15, 0.03))], seed=1)
    assert diags == [] and len(books) == 2
    for b in books:
        assert rect_contains(desk.aabb, b.aabb)
        assert b.position[2] == pytest.approx(0.75) and b.parent == "desk-0"
    assert not rects_overlap(books[0].aabb, books[1].aabb)


sizes = st.tuples(st.floats(0.05, 0.6), st.floats(0.05, 0.6), st.floats(0.01, 0.3))


@given(st.lists(sizes, min_size=1, max_size=8), st.integers(0, 1000), st.sampled_from([0, 90, 180, 270]))
def test_small_objects_stay_on_top_and_apart(child_sizes, seed, yaw):
    table = PlacedObject("table-0", "table_01", ROOM.name, "floor", (2.5, 2.0, 0.0), yaw, (1.4, 0.9, 0.72))
    kids = [(f"item-{i}", "item", s) for i, s in enumerate(child_sizes)]
    placed, diags = spawn_small_objects(table, kids, seed)
    assert len(placed) + len(diags) == len(kids)
    for i, a in enumerate(placed):
        assert rect_contains(table.aabb, a.aabb)
        for b in placed[i + 1:]:
            assert not rects_overlap(a.aabb, b.aabb)
    assert spawn_small_objects(table, kids, seed) == (placed, diags)


def scene():
    doors = place_doors(PLAN, [DoorSpec("exterior", ROOM.name, "doorway", "single", "wooden door")])
    wins = place_windows(PLAN, [WindowSpec(ROOM.name, "west", "hung", (130, 130), 1, 90)], doors)
    objs = [sofa(), place_ceiling_object("ceiling-0", "lamp_01", (0.5, 0.5, 0.2), ROOM, 3.0)]
    return SceneDocument({"prompt": "test", "seed": 0}, PLAN, doors, wins, objs, ["door_01"], [])


def test_scene_round_trip():
    text = export_scene(scene())
    assert export_scene(parse_scene(text)) == text
    data = json.loads(text)
    assert data["schema"] == "roomgen.scene/1"
    assert [o["instance_id"] for o in data["objects"]] == ["sofa-0", "ceiling-0"]


def test_empty_scene_round_trip():
    doc = SceneDocument({}, FloorPlan((), 3.0))
    text = export_scene(doc)
    assert export_scene(parse_scene(text)) == text


def test_svg_scale_and_labels():
    doc = SceneDocument({}, FloorPlan((rect_room("box", 0, 0, 4, 4),), 3.0),
                        objects=[PlacedObject("bed-0", "bed_01", "box", "floor", (2, 2, 0), 0, (1.6, 2.0, 0.5))])
    root = ET.fromstring(render_svg(doc))
    ns = "{http://www.w3.org/2000/svg}"
    room = [r for r in root.iter(ns + "rect") if r.get("class") == "room"][0]
    assert (room.get("width"), room.get("height")) == ("200.00", "200.00")
    labels = [t.text for t in root.iter(ns + "text")]
    assert "box" in labels and "bed-0" in labels
    assert render_svg(doc) == render_svg(doc)

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from roomgen.errors import (
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
from roomgen.floorplan import FloorPlan, parse_floor_plan_text, rect_room
from roomgen.openings import (
    WINDOW_CATALOG,
    DoorSpec,
    WindowSpec,
    format_door_line,
    format_window_line,
    parse_door_line,
    parse_window_line,
    place_doors,
    place_windows,
    same_wall_line,
    window_size_valid,
)

PLAN_TEXT = (
    "living room | maple hardwood, matte | light grey drywall, smooth | [(0, 0), (0, 8), (5, 8), (5, 0)]\n"
    "kitchen | white hex tile, glossy | light grey drywall, smooth | [(5, 0), (5, 5), (8, 5), (8, 0)]\n"
)


def plan(height=3.0):
    return FloorPlan(tuple(parse_floor_plan_text(PLAN_TEXT)), height)


def test_catalog_table():
    assert {k: len(v) for k, v in WINDOW_CATALOG.items()} == {"fixed": 6, "hung": 6, "slider": 6}
    assert window_size_valid("fixed", (150, 92)) and window_size_valid("slider", (150, 92))
    assert not window_size_valid("fixed", (130, 130))


def test_open_connection_takes_shared_wall():
    doors = place_doors(plan(), [
        parse_door_line("exterior | living room | doorway | double | dark brown metal door"),
        parse_door_line("living room | kitchen | open | N/A | N/A"),
    ])
    open_door = doors[1]
    assert open_door.is_open
    assert (open_door.wall.start.x, open_door.wall.start.y, open_door.wall.end.x, open_door.wall.end.y) == (5, 0, 5, 5)
    assert open_door.interval() == (0, 5)


def test_double_exterior_door_centered_on_5m_wall():
    single = FloorPlan((rect_room("living room", 0, 0, 5, 3.5),))
    (door,) = place_doors(single, [DoorSpec("exterior", "living room", "doorway", "double", "metal")])
    assert door.wall.length == 5
    assert door.width == 2.0 and door.offset == pytest.approx(1.5)
    lo, hi = door.interval()
    s0, s1 = door.wall.span
    assert s0 <= lo < hi <= s1  # containment oracle


def test_double_door_on_short_shared_wall():
    p = FloorPlan((rect_room("a", 0, 0, 4, 4), rect_room("b", 4, 2.5, 8, 6.5)))
    with pytest.raises(DoorTooWide):
        place_doors(p, [DoorSpec("exterior", "a", "doorway", "single"), DoorSpec("a", "b", "doorway", "double")])


def test_door_errors():
    with pytest.raises(MissingExteriorDoor):
        place_doors(plan(), [DoorSpec("living room", "kitchen", "doorway", "single")])
    with pytest.raises(NoSharedWall):
        p = FloorPlan((rect_room("a", 0, 0, 4, 4), rect_room("b", 4, 0, 8, 4), rect_room("c", 8, 0, 12, 4)))
        place_doors(p, [DoorSpec("exterior", "a", "doorway", "single"), DoorSpec("a", "c", "doorway", "single")])
    with pytest.raises(UnknownConnectionType):
        parse_door_line("a | b | portal | single | N/A")
    with pytest.raises(InvalidSize):
        DoorSpec("a", "b", "doorway", "triple")


def test_example_window_line_parses_but_is_not_in_catalog():
    spec = parse_window_line("living room | west | fixed | (130, 130) | 1 | 50")
    assert spec == WindowSpec("living room", "west", "fixed", (130, 130), 1, 50)
    assert not spec.catalog_valid
    with pytest.raises(InvalidWindowSize):
        place_windows(plan(), [spec])


def test_window_centered_on_8m_wall():
    (w,) = place_windows(plan(), [WindowSpec("living room", "west", "hung", (130, 130), 1, 50)])
    assert w.wall.length == 8
    assert w.offset == pytest.approx((8 - 1.3) / 2)
    assert w.base_height == pytest.approx(0.5) and w.height == pytest.approx(1.3)


def test_window_overflow_and_height():
    with pytest.raises(WindowOverflow):
        place_windows(FloorPlan((rect_room("r", 0, 0, 5, 5),)), [WindowSpec("r", "south", "fixed", (240, 180), 4, 50)])
    with pytest.raises(WindowOverflow):
        place_windows(plan(3.0), [WindowSpec("living room", "west", "hung", (87, 160), 1, 160)])


def test_window_door_collision():
    p = FloorPlan((rect_room("r", 0, 0, 5, 4),))
    doors = place_doors(p, [DoorSpec("exterior", "r", "doorway", "double")])
    direction = doors[0].wall.direction
    with pytest.raises(WindowDoorCollision):
        place_windows(p, [WindowSpec("r", direction, "fixed", (150, 120), 1, 60)], doors)


def test_mixed_window_types_in_one_room_rejected():
    with pytest.raises(InvalidSize):
        place_windows(plan(), [WindowSpec("living room", "west", "hung", (130, 130), 1, 50),
                               WindowSpec("living room", "north", "fixed", (150, 120), 1, 50)])


@given(st.sampled_from(sorted(WINDOW_CATALOG)), st.integers(1, 400), st.integers(1, 400))
def test_catalog_rejects_any_size_outside_table(wtype, w, h):
    assume((w, h) not in WINDOW_CATALOG[wtype])
    spec = WindowSpec("r", "south", wtype, (w, h), 1, 50)
    with pytest.raises(InvalidWindowSize):
        spec.check_catalog()


@given(st.sampled_from([(t, s) for t, sizes in WINDOW_CATALOG.items() for s in sizes]),
       st.integers(1, 3), st.sampled_from(["north", "south", "east", "west"]))
def test_placed_openings_are_disjoint_and_inside(ts, qty, direction):
    wtype, size = ts
    p = FloorPlan((rect_room("r", 0, 0, 8, 6),), 3.0)
    doors = place_doors(p, [DoorSpec("exterior", "r", "doorway", "single")])
    try:
        wins = place_windows(p, [WindowSpec("r", direction, wtype, size, qty, 40)], doors)
    except (WindowOverflow, WindowDoorCollision):
        return
    ops = [(o.wall, o.interval()) for o in list(doors) + wins]
    for wall, (lo, hi) in ops:
        s0, s1 = wall.span
        assert s0 - 1e-9 <= lo < hi <= s1 + 1e-9
    for i, (wa, a) in enumerate(ops):
        for wb, b in ops[i + 1:]:
            if same_wall_line(wa, wb):
                assert a[1] <= b[0] + 1e-9 or b[1] <= a[0] + 1e-9


@pytest.mark.parametrize("line", [
    "exterior | living room | doorway | double | dark brown metal door",
    "living room | kitchen | open | N/A | N/A",
    "living room | bedroom | doorway | single | wooden door with white frames",
])
def test_door_lines_round_trip(line):
    assert format_door_line(parse_door_line(line)) == line


def test_window_line_round_trip_and_malformed():
    line = "living room | west | fixed | (130, 130) | 1 | 50"
    assert format_window_line(parse_window_line(line)) == line
    with pytest.raises(MalformedLine):
        parse_window_line("living room | west | fixed | (130, 130) | 1")
    with pytest.raises(MalformedLine):
        parse_window_line("living room | up | fixed | (150, 120) | 1 | 50")

import json

import httpx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from roomgen.errors import BadVertexCount, FixtureMiss, InvalidWindowSize, MalformedLine, MalformedStructure, MissingPlaceholder, ParseError
from roomgen.llm import (
    TEMPLATE_IDS,
    FixtureBackend,
    LiveBackend,
    PipelineError,
    WallPlacement,
    format_object_selection,
    format_wall_placement,
    parse_doorways,
    parse_floor_plan_response,
    parse_layout,
    parse_object_selection,
    parse_wall_height,
    parse_wall_placement,
    parse_windows,
    placeholders,
    render,
    run_pipeline,
    template,
)
from roomgen.retrieval import default_catalog

SELECTION = """Here is what I would put in the room.
```json
{
    "sofa": {"description": "grey fabric three seat sofa", "location": "floor", "size": [210, 90, 85],
             "quantity": 1, "variance_type": "same",
             "objects_on_top": [{"object_name": "cushion", "quantity": 2, "variance_type": "varied"}]},
    "painting": {"description": "abstract canvas painting", "location": "wall", "size": [100, 3, 70],
                 "quantity": 1, "variance_type": "same", "objects_on_top": []}
}
```"""


def bindings(tid):
    return {n: f"<{n}>" for n in placeholders(tid)}


def test_templates_load():
    for tid in TEMPLATE_IDS:
        assert template(tid).strip()


def test_floor_plan_render_keeps_guidelines():
    text = render("floor_plan", {"input": "a cozy cabin", "additional_requirements": "N/A"})
    assert "a cozy cabin" in text and "3m to 8m" in text
    assert "{input}" not in text


def test_missing_placeholder_is_named():
    b = bindings("window")
    del b["walls"]
    with pytest.raises(MissingPlaceholder) as exc:
        render("window", b)
    assert "walls" in str(exc.value)


@pytest.mark.parametrize("tid", TEMPLATE_IDS)
def test_render_is_deterministic(tid):
    assert render(tid, bindings(tid)) == render(tid, bindings(tid))


def test_floor_plan_response():
    raw = ("living room | maple hardwood, matte | light grey drywall, smooth | [(0, 0), (0, 8), (5, 8), (5, 0)]\n"
           "kitchen | white hex tile, glossy | light grey drywall, smooth | [(5, 0), (5, 5), (8, 5), (8, 0)]\n"
           "3.0\n")
    rooms, h = parse_floor_plan_response(raw)
    assert [r.name for r in rooms] == ["living room", "kitchen"] and h == 3.0


@pytest.mark.parametrize("raw, want", [("3.0", 3.0), ("3.0 m", 3.0), ("2.7m", 2.7), (" 3 meters ", 3.0)])
def test_wall_height_accepts_numbers(raw, want):
    assert parse_wall_height(raw) == want


@pytest.mark.parametrize("raw", ["tall", "", "-3", "0", "3.0 feet"])
def test_wall_height_rejects_the_rest(raw):
    with pytest.raises(ParseError):
        parse_wall_height(raw)


def test_room_line_errors():
    with pytest.raises(MalformedLine):
        parse_floor_plan_response("kitchen | tile | drywall\n3.0\n")
    with pytest.raises(BadVertexCount):
        parse_floor_plan_response("kitchen | tile, a | wall, b | [(0, 0), (0, 4), (4, 4), (4, 0), (2, 0)]\n3.0\n")


def test_doorway_and_window_lines():
    doors = parse_doorways("exterior | living room | doorway | double | dark brown metal door\n"
                           "living room | kitchen | open | N/A | N/A\n")
    assert [d.connection for d in doors] == ["doorway", "open"]
    with pytest.raises(InvalidWindowSize):
        parse_windows("living room | west | fixed | (130, 130) | 1 | 50\n")
    (w,) = parse_windows("living room | west | hung | (130, 130) | 1 | 50\n")
    assert w.size_cm == (130, 130)


def test_object_selection_after_preamble():
    qs = parse_object_selection(SELECTION)
    assert [q.name for q in qs] == ["sofa", "painting"]
    sofa = qs[0]
    assert sofa.target_dims_cm == (210, 90, 85) and sofa.location == "floor"
    assert sofa.children[0].quantity == 2 and sofa.children[0].location == "on_object"
    assert parse_object_selection(format_object_selection(qs)) == qs


REQUIRED = ["description", "location", "size", "quantity", "variance_type"]


@given(st.sampled_from(["sofa", "painting"]), st.sampled_from(REQUIRED))
def test_deleting_a_required_field_fails(name, field):
    data = json.loads(SELECTION[SELECTION.index("{"):SELECTION.rindex("}") + 1])
    del data[name][field]
    with pytest.raises(MalformedStructure):
        parse_object_selection(json.dumps(data))


@pytest.mark.parametrize("bad", ["no json here", "{not json}", '{"a": 1}',
                                 '{"a": {"description": "x", "location": "roof", "size": [1, 2, 3], '
                                 '"quantity": 1, "variance_type": "same"}}',
                                 '{"a": {"description": "x", "location": "floor", "size": [1, 2], '
                                 '"quantity": 1, "variance_type": "same"}}',
                                 '{"a": {"description": "x", "location": "floor", "size": [1, 2, 3], '
                                 '"quantity": 0, "variance_type": "same"}}'])
def test_bad_object_selection(bad):
    with pytest.raises(MalformedStructure):
        parse_object_selection(bad)


def test_layout_ignores_prose():
    g = parse_layout("Sure.\nsofa-0 | edge\ncoffee table-0 | middle | near, sofa-0\nHope this helps.\n")
    assert g.ids == ["sofa-0", "coffee table-0"]


def test_wall_placement_round_trip():
    items = parse_wall_placement("painting-0 | above, sofa-0 | 150\nclock-0 | above, desk-0 | 180.5\n")
    assert items == [WallPlacement("painting-0", "sofa-0", 150.0), WallPlacement("clock-0", "desk-0", 180.5)]
    assert parse_wall_placement(format_wall_placement(items)) == items
    with pytest.raises(MalformedLine):
        parse_wall_placement("painting-0 | above, sofa-0\n")
    with pytest.raises(MalformedLine):
        parse_wall_placement("painting-0 | near, sofa-0 | 150\n")


@pytest.mark.parametrize("name, rooms", [("studio", 1), ("office", 2), ("apartment", 3)])
def test_call_count_is_three_plus_three_per_room(fixtures_dir, name, rooms):
    d = fixtures_dir / name
    req = json.loads((d / "source" / "request.json").read_text())
    doc, tr = run_pipeline(req["prompt"], req.get("requirements", "N/A"), FixtureBackend(d), default_catalog())
    k = len(doc.plan.rooms)
    assert k == rooms
    assert tr.total == 3 + 3 * k
    assert tr.call_count == {"floor_plan": 1, "doorway": 1, "window": 1,
                             "object_selection": k, "layout": k, "wall_placement": k}


def test_fixture_miss_names_stage(fixtures_dir):
    backend = FixtureBackend(fixtures_dir / "studio")
    with pytest.raises(FixtureMiss) as exc:
        backend.complete("never recorded", "floor_plan")
    assert exc.value.context["stage"] == "floor_plan"
    with pytest.raises(PipelineError) as perr:
        run_pipeline("an unrecorded prompt", "N/A", backend, default_catalog())
    assert perr.value.stage == "floor_plan" and perr.value.code == "fixture_miss"


def test_live_backend_over_mock_transport():
    seen = {}

    def handler(request: httpx.Request) -> httpx.Response:
        seen["url"] = str(request.url)
        seen["auth"] = request.headers.get("authorization")
        seen["body"] = json.loads(request.content)
        return httpx.Response(200, json={"choices": [{"message": {"content": "3.0"}}]})

    client = httpx.Client(transport=httpx.MockTransport(handler))
    be = LiveBackend("http://llm.test/v1", "k3y", model="m", client=client)
    assert be.complete("hello", "wall_height") == "3.0"
    assert seen["url"] == "http://llm.test/v1/chat/completions"
    assert seen["auth"] == "Bearer k3y"
    assert seen["body"]["messages"] == [{"role": "user", "content": "hello"}]
    assert seen["body"]["temperature"] == 0.0


def test_live_backend_rejects_odd_payload():
    client = httpx.Client(transport=httpx.MockTransport(lambda r: httpx.Response(200, json={"nope": 1})))
    with pytest.raises(MalformedStructure):
        LiveBackend("http://llm.test", "", client=client).complete("x")

import json

import pytest

from roomgen.cli import main

GOOD_PLAN = "living room | maple hardwood, matte | light grey drywall, smooth | [(0, 0), (0, 8), (5, 8), (5, 0)]\n"
BAD_PLAN = GOOD_PLAN + "den | maple hardwood, matte | light grey drywall, smooth | [(1, 1), (1, 5), (4, 5), (4, 1)]\n"


def bedroom_args(layouts_dir, *extra):
    d = layouts_dir / "bedroom"
    return ["solve-layout", "--room", str(d / "room.txt"), "--constraints", str(d / "graph.txt"), *extra]


def test_validate_floorplan(tmp_path, capsys):
    good, bad = tmp_path / "good.txt", tmp_path / "bad.txt"
    good.write_text(GOOD_PLAN)
    bad.write_text(BAD_PLAN)
    assert main(["validate-floorplan", str(good)]) == 0
    assert main(["validate-floorplan", str(bad)]) == 1
    cap = capsys.readouterr()
    assert "overlap" in cap.out + cap.err


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["solve-layout"])
    assert exc.value.code == 2
    assert main(["validate-floorplan", "/nonexistent/plan.txt"]) == 2


def test_solve_layout_is_reproducible(layouts_dir, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(bedroom_args(layouts_dir, "--seed", "7", "--out", str(a))) == 0
    assert main(bedroom_args(layouts_dir, "--seed", "7", "--out", str(b))) == 0
    assert a.read_bytes() == b.read_bytes()
    out = json.loads(a.read_text())
    assert out["complete"] and set(out["placements"]) >= {"bed-0", "chair-0"}


@pytest.mark.parametrize("strategy", ["edge", "random"])
def test_baseline_strategies(layouts_dir, tmp_path, strategy):
    out = tmp_path / "o.json"
    assert main(bedroom_args(layouts_dir, "--strategy", strategy, "--out", str(out))) == 0
    assert "placements" in json.loads(out.read_text())


def test_absolute_strategy_reports(layouts_dir, tmp_path):
    out = tmp_path / "o.json"
    args = bedroom_args(layouts_dir, "--strategy", "absolute",
                        "--placements", str(layouts_dir / "bedroom" / "absolute.json"), "--out", str(out))
    assert main(args) == 0
    diags = json.loads(out.read_text())["diagnostics"]
    assert any(d.startswith("collision") for d in diags) and any(d.startswith("out_of_bounds") for d in diags)


def test_encode_milp(layouts_dir, tmp_path):
    d = layouts_dir / "living_room"
    out = tmp_path / "m.lp"
    assert main(["encode-milp", "--room", str(d / "room.txt"), "--constraints", str(d / "graph.txt"),
                 "--out", str(out)]) == 0
    assert out.read_text().startswith("\\")


def test_query_assets(capsys):
    assert main(["query-assets", "--desc", "cat tower", "--dims", "60,60,150", "--k", "2"]) == 0
    assert "cat_tower_01" in capsys.readouterr().out.splitlines()[0]


def test_generate_and_render(fixtures_dir, tmp_path):
    req = json.loads((fixtures_dir / "apartment" / "source" / "request.json").read_text())
    scene, svg = tmp_path / "scene.json", tmp_path / "scene.svg"
    args = ["generate", "--prompt", req["prompt"], "--requirements", req.get("requirements", "N/A"),
            "--fixtures", str(fixtures_dir / "apartment"), "--out", str(scene), "--svg", str(svg)]
    assert main(args) == 0
    transcript = tmp_path / "scene.transcript.jsonl"
    assert len(transcript.read_text().splitlines()) == 3 + 3 * 3
    again = tmp_path / "again.svg"
    assert main(["render", "--scene", str(scene), "--out", str(again)]) == 0
    assert again.read_text() == svg.read_text()


def test_generate_fixture_miss(fixtures_dir, tmp_path, capsys):
    args = ["generate", "--prompt", "a lighthouse", "--fixtures", str(fixtures_dir / "apartment"),
            "--out", str(tmp_path / "s.json")]
    assert main(args) == 1
    assert "fixture_miss" in capsys.readouterr().err

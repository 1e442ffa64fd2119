"""Compile hand-written LLM responses into prompt-hash fixture files.

Each fixture directory holds ``source/`` with ``request.json`` (prompt and
requirements), ``floor_plan.txt``, ``doorway.txt``, ``window.txt`` and one
``rooms/<room name>/`` folder per room with ``object_selection.txt``,
``layout.txt`` and ``wall_placement.txt``. The pipeline is run against these
responses (matched by stage name) and every rendered prompt is recorded
into ``fixtures.jsonl``, the file the fixture backend reads.

Rerun after any change to prompt rendering:

    python3 scripts/build_fixtures.py tests/fixtures/apartment ...
"""

import argparse
import json
import sys
from pathlib import Path

from roomgen.llm import RecordingBackend, ScriptedBackend, run_pipeline
from roomgen.retrieval import default_catalog


def load_source(fixture_dir: Path) -> tuple[dict, dict[str, str]]:
    src = fixture_dir / "source"
    request = json.loads((src / "request.json").read_text())
    responses = {stage: (src / f"{stage}.txt").read_text() for stage in ("floor_plan", "doorway", "window")}
    for room_dir in sorted((src / "rooms").iterdir()):
        for f in sorted(room_dir.glob("*.txt")):
            responses[f"{f.stem}:{room_dir.name}"] = f.read_text()
    return request, responses


def build(fixture_dir: Path) -> int:
    request, responses = load_source(fixture_dir)
    rec = RecordingBackend(ScriptedBackend(responses))
    doc, transcript = run_pipeline(request["prompt"], request.get("requirements", "N/A"), rec,
                                   default_catalog(), seed=request.get("seed", 0))
    rec.dump(fixture_dir / "fixtures.jsonl")
    unused = set(responses) - {c.stage for c in transcript.calls}
    if unused:
        print(f"{fixture_dir}: unused source responses {sorted(unused)}", file=sys.stderr)
    print(f"{fixture_dir}: {transcript.total} calls, {len(doc.plan.rooms)} rooms, "
          f"{len(doc.objects)} objects, {len(doc.diagnostics)} diagnostics")
    return transcript.total


def main(argv=None):
    ap = argparse.ArgumentParser(description="compile fixture sources into fixtures.jsonl")
    ap.add_argument("dirs", nargs="*", type=Path)
    args = ap.parse_args(argv)
    dirs = args.dirs or sorted(p.parent for p in Path("tests/fixtures").glob("*/source"))
    for d in dirs:
        build(d)


if __name__ == "__main__":
    main()

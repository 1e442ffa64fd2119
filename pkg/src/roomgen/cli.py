"""Command-line entry point.

Exit codes: 0 success, 1 validation or solver error, 2 usage error.
Diagnostics go to stderr; artifacts to files or stdout.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .assembly import export_scene, parse_scene, render_svg
from .constraints import PredicateParams, parse_scene_graph
from .errors import SceneError
from .floorplan import FloorPlan, parse_floor_plan_text, validate_plan
from .layout import (
    DEFAULT_GRID_STEP,
    DEFAULT_MAX_CANDIDATES,
    DEFAULT_MAX_NODES,
    STRATEGIES,
    PlacementProblem,
    apply_absolute,
    footprint_from_dict,
    parse_room_text,
    layout_to_dict,
    problem_from_dict,
)

log = logging.getLogger("roomgen")

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Settings read from ``--config`` (JSON)."""

    params: PredicateParams = PredicateParams()
    grid_step: float = DEFAULT_GRID_STEP
    max_candidates: int = DEFAULT_MAX_CANDIDATES
    wall_clock_seconds: float | None = None
    threads: int = 1
    max_nodes: int | None = DEFAULT_MAX_NODES
    milp_max_evaluations: int = 20_000_000

    @classmethod
    def load(cls, path: str | None) -> "RunConfig":
        if path is None:
            return cls()
        try:
            data = json.loads(Path(path).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config is not valid JSON: {exc}") from exc
        known = {"predicates", "grid_step", "max_candidates", "max_nodes", "wall_clock_seconds",
                 "threads", "milp_max_evaluations"}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        kw = {k: data[k] for k in known - {"predicates"} if k in data}
        try:
            if "predicates" in data:
                kw["params"] = PredicateParams.from_dict(data["predicates"])
            return cls(**kw)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad config: {exc}") from exc


@dataclass
class CliConfig:
    subcommand: str
    seed: int = 0
    config: str | None = None
    verbose: bool = False
    run: RunConfig = field(default_factory=RunConfig)


# ---------------------------------------------------------------- inputs

def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc


def load_problem(args, cfg: CliConfig) -> PlacementProblem:
    run = cfg.run
    text = _read(args.room)
    step = args.grid_step or run.grid_step
    max_cand = args.max_candidates or run.max_candidates
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.room}: {exc}") from exc
        graph = parse_scene_graph(_read(args.constraints)) if args.constraints else None
        overrides = ({"params": run.params, "grid_step": step, "max_candidates": max_cand,
                      "max_nodes": run.max_nodes} if cfg.config else {})
        if args.grid_step:
            overrides["grid_step"] = step
        if args.max_candidates:
            overrides["max_candidates"] = max_cand
        return problem_from_dict(data, graph, **overrides)
    if not args.constraints:
        raise UsageError("--constraints is required with a text room file")
    room, objects = parse_room_text(text)
    graph = parse_scene_graph(_read(args.constraints))
    try:
        return PlacementProblem(room, tuple(objects), graph, run.params, step, max_cand,
                                run.wall_clock_seconds, run.max_nodes)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------- commands

def cmd_generate(args, cfg: CliConfig) -> int:
    from .llm import FixtureBackend, LiveBackend, PipelineConfig, PipelineError, RecordingBackend, run_pipeline
    from .retrieval import Catalog, default_catalog

    if args.backend == "fixture":
        if not args.fixtures:
            raise UsageError("--fixtures DIR is required with --backend fixture")
        backend = FixtureBackend(args.fixtures)
        recorder = None
    else:
        recorder = RecordingBackend(LiveBackend())
        backend = recorder
    catalog = Catalog.load(args.catalog) if args.catalog else default_catalog()
    pc = PipelineConfig(cfg.run.params, cfg.run.grid_step, cfg.run.max_candidates,
                        args.threads or cfg.run.threads)
    out = Path(args.out)
    transcript_path = Path(args.transcript) if args.transcript else out.with_suffix(".transcript.jsonl")
    try:
        doc, transcript = run_pipeline(args.prompt, args.requirements, backend, catalog, seed=cfg.seed, config=pc)
    except PipelineError as exc:
        transcript_path.write_text(exc.transcript.to_jsonl())
        raise
    finally:
        if recorder is not None and args.fixtures:
            Path(args.fixtures).mkdir(parents=True, exist_ok=True)
            recorder.dump(Path(args.fixtures) / "fixtures.jsonl")
    out.write_text(export_scene(doc))
    transcript_path.write_text(transcript.to_jsonl())
    if args.svg:
        Path(args.svg).write_text(render_svg(doc))
    log.info("%d calls, %d rooms, %d objects", transcript.total, len(doc.plan.rooms), len(doc.objects))
    for d in doc.diagnostics:
        print(f"note: {d}", file=sys.stderr)
    return EXIT_OK


def cmd_validate_floorplan(args, cfg: CliConfig) -> int:
    rooms = parse_floor_plan_text(_read(args.plan))
    report = validate_plan(FloorPlan(tuple(rooms), args.wall_height))
    for f in report.findings:
        print(f"{f.severity} [{f.code}]: {f.message}", file=sys.stderr)
    if report.ok:
        print(f"ok: {len(rooms)} rooms")
        return EXIT_OK
    return EXIT_INVALID


def cmd_solve_layout(args, cfg: CliConfig) -> int:
    p = load_problem(args, cfg)
    if args.strategy == "milp":
        from .milp import solve_problem

        layout = solve_problem(p, max_evaluations=cfg.run.milp_max_evaluations)
    elif args.strategy == "absolute":
        if not args.placements:
            raise UsageError("--placements FILE is required with --strategy absolute")
        given = json.loads(_read(args.placements))
        dims = {o.id: o for o in p.objects}
        provided = {k: footprint_from_dict(v, dims[k].width, dims[k].depth) for k, v in given.items()}
        layout = apply_absolute(p.room, provided, p.graph, p.params)
    else:
        layout = STRATEGIES[args.strategy](p, seed=cfg.seed)
    result = layout_to_dict(layout)
    if layout.milp_objective is not None:
        result["milp_objective"] = layout.milp_objective
    _emit(_dump(result), args.out)
    for d in layout.diagnostics:
        print(f"note: {d}", file=sys.stderr)
    return EXIT_OK


def cmd_encode_milp(args, cfg: CliConfig) -> int:
    from .milp import encode, export_lp

    m = encode(load_problem(args, cfg))
    _emit(export_lp(m), args.out)
    log.info("%d variables, %d rows", len(m.variables), len(m.rows))
    return EXIT_OK


def cmd_solve_milp(args, cfg: CliConfig) -> int:
    args.strategy = "milp"
    args.placements = None
    return cmd_solve_layout(args, cfg)


def _dims(text: str | None):
    if not text:
        return None
    try:
        vals = tuple(float(v) for v in text.replace("x", ",").split(","))
    except ValueError as exc:
        raise UsageError(f"--dims must be 'w,d,h' in cm: {exc}") from exc
    if len(vals) != 3:
        raise UsageError("--dims must have three numbers")
    return vals


def cmd_query_assets(args, cfg: CliConfig) -> int:
    from .retrieval import Catalog, HashingProvider, ObjectQuery, default_catalog, retrieve

    catalog = Catalog.load(args.catalog) if args.catalog else default_catalog()
    q = ObjectQuery(args.desc, _dims(args.dims), args.location)
    for rec, score in retrieve(catalog, q, HashingProvider(), args.k):
        w, d, h = rec.dims_cm
        print(f"{rec.asset_id}\t{score:.6f}\t{w:g}x{d:g}x{h:g}\t{rec.description}")
    return EXIT_OK


def cmd_render(args, cfg: CliConfig) -> int:
    doc = parse_scene(_read(args.scene))
    Path(args.out).write_text(render_svg(doc))
    return EXIT_OK


def cmd_ingest_catalog(args, cfg: CliConfig) -> int:
    from .retrieval import Catalog, HashingProvider, embed_record, record_from_annotation

    p = HashingProvider()
    records = []
    for lineno, line in enumerate(_read(args.input).splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.input}:{lineno}: {exc}") from exc
        rec = record_from_annotation(obj)
        records.append(embed_record(rec, p, obj.get("viewCaptions")))
    out = Path(args.out)
    emb = Path(args.embeddings) if args.embeddings else out.with_suffix(".emb")
    Catalog(records).dump(out, emb)
    print(f"{len(records)} assets -> {out}, {emb}")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--config", help="JSON file with predicate parameters and solver budgets")
    common.add_argument("--verbose", "-v", action="store_true", help="log progress to stderr")

    ap = argparse.ArgumentParser(prog="roomgen", description="Text-to-scene generation tools.")
    ap.add_argument("--version", action="version", version=f"roomgen {__version__}")
    sub = ap.add_subparsers(dest="subcommand", required=True, metavar="COMMAND")

    g = sub.add_parser("generate", parents=[common], help="run the full pipeline on a prompt")
    g.add_argument("--prompt", required=True)
    g.add_argument("--requirements", default="N/A")
    g.add_argument("--backend", choices=("fixture", "live"), default="fixture")
    g.add_argument("--fixtures", help="fixture directory (read for fixture, written for live)")
    g.add_argument("--catalog", help="catalog JSONL (default: bundled demo catalog)")
    g.add_argument("--out", default="scene.json")
    g.add_argument("--transcript", help="default: the --out path with suffix .transcript.jsonl")
    g.add_argument("--svg", help="also write a top-down SVG")
    g.add_argument("--threads", type=int, default=None, help="rooms furnished in parallel")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("validate-floorplan", parents=[common], help="check a floor-plan text file")
    v.add_argument("plan")
    v.add_argument("--wall-height", type=float, default=3.0)
    v.set_defaults(func=cmd_validate_floorplan)

    def problem_args(p):
        p.add_argument("--room", required=True, help="room file (text or JSON problem)")
        p.add_argument("--constraints", help="constraint lines, one object per line")
        p.add_argument("--grid-step", "--grid", dest="grid_step", type=float, default=None,
                       help="candidate grid spacing in meters (default 0.25)")
        p.add_argument("--max-candidates", type=int, default=None,
                       help="stop after this many complete layouts (default 10000)")
        p.add_argument("--out", help="output file (default stdout)")

    s = sub.add_parser("solve-layout", parents=[common], help="place objects in one room")
    problem_args(s)
    s.add_argument("--strategy", choices=sorted([*STRATEGIES, "milp", "absolute"]), default="dfs")
    s.add_argument("--placements", help="JSON {id: {x, y, yaw}} for --strategy absolute")
    s.set_defaults(func=cmd_solve_layout)

    e = sub.add_parser("encode-milp", parents=[common], help="write the layout MILP in LP format")
    problem_args(e)
    e.set_defaults(func=cmd_encode_milp)

    m = sub.add_parser("solve-milp", parents=[common], help="solve the layout MILP on the grid")
    problem_args(m)
    m.set_defaults(func=cmd_solve_milp)

    q = sub.add_parser("query-assets", parents=[common], help="rank catalog assets for a query")
    q.add_argument("--desc", required=True)
    q.add_argument("--dims", help="target size 'w,d,h' in cm")
    q.add_argument("--location", choices=("floor", "wall", "ceiling", "on_object"), default="floor")
    q.add_argument("--k", type=int, default=5)
    q.add_argument("--catalog")
    q.set_defaults(func=cmd_query_assets)

    r = sub.add_parser("render", parents=[common], help="top-down SVG of a scene file")
    r.add_argument("--scene", required=True)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_render)

    i = sub.add_parser("ingest-catalog", parents=[common], help="annotations JSONL -> catalog + embeddings")
    i.add_argument("input")
    i.add_argument("--out", required=True)
    i.add_argument("--embeddings", help="sidecar path (default <out>.emb)")
    i.set_defaults(func=cmd_ingest_catalog)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = CliConfig(args.subcommand, args.seed, args.config, args.verbose, RunConfig.load(args.config))
        if getattr(args, "k", 1) < 1:
            raise UsageError("--k must be at least 1")
        return args.func(args, cfg)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        print(f"roomgen: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SceneError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

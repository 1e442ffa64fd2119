"""Bridges from oracle instances to solver inputs."""

from oracles import Instance

from roomgen.constraints import parse_scene_graph
from roomgen.geometry import Rect
from roomgen.layout import ObjectDims, PlacementProblem


def to_problem(inst: Instance, **kw) -> PlacementProblem:
    kw.setdefault("max_candidates", None)
    kw.setdefault("max_nodes", None)
    return PlacementProblem(Rect.from_bounds(*inst.room),
                            tuple(ObjectDims(i, w, d) for i, w, d in inst.objects),
                            parse_scene_graph(inst.graph_text()), grid_step=inst.step, **kw)

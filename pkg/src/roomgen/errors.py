"""Exception hierarchy.

Every error carries a short machine-readable ``code`` that the CLI prints
alongside the message.
"""

from __future__ import annotations


class SceneError(Exception):
    """Base class for all validation and solver errors in roomgen."""

    code = "scene_error"

    def __init__(self, message: str = "", **context):
        super().__init__(message or self.code)
        self.context = context


# floor plan / openings
class NoSharedWall(SceneError):
    code = "no_shared_wall"


class DoorTooWide(SceneError):
    code = "door_too_wide"


class MissingExteriorDoor(SceneError):
    code = "missing_exterior_door"


class WindowOverflow(SceneError):
    code = "window_overflow"


class WindowDoorCollision(SceneError):
    code = "window_door_collision"


class InvalidSize(SceneError):
    code = "invalid_size"


# constraint DSL and predicates
class UnknownConstraint(SceneError):
    code = "unknown_constraint"


class MissingGlobal(SceneError):
    code = "missing_global"


class ForwardReference(SceneError):
    code = "forward_reference"


class DuplicateObject(SceneError):
    code = "duplicate_object"


class MissingTarget(SceneError):
    code = "missing_target"


class UnsupportedInFloorSolver(SceneError):
    code = "unsupported_in_floor_solver"


# solvers
class EmptyRoom(SceneError):
    code = "empty_room"


class UnsupportedConstraint(SceneError):
    code = "unsupported_constraint"


class Infeasible(SceneError):
    code = "infeasible"


class BudgetExceeded(SceneError):
    code = "budget_exceeded"


# retrieval
class NoRenders(SceneError):
    code = "no_renders"


class EmptyCatalogAfterFilter(SceneError):
    code = "empty_catalog_after_filter"


# llm gateway
class MissingPlaceholder(SceneError):
    code = "missing_placeholder"


class MalformedLine(SceneError):
    code = "malformed_line"


class BadVertexCount(SceneError):
    code = "bad_vertex_count"


class ParseError(SceneError):
    code = "parse_error"


class MalformedStructure(SceneError):
    code = "malformed_structure"


class UnknownConnectionType(SceneError):
    code = "unknown_connection_type"


class InvalidWindowSize(InvalidSize):
    code = "invalid_window_size"


class FixtureMiss(SceneError):
    code = "fixture_miss"


class PlanInvalid(SceneError):
    code = "plan_invalid"


# scene assembly
class NoAdjacentWall(SceneError):
    code = "no_adjacent_wall"


class OpeningCollision(SceneError):
    code = "opening_collision"

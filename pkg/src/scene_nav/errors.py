"""Exception hierarchy shared by all scene_nav modules."""


class SceneNavError(Exception):
    """Base class for all errors raised by this package."""


class GeometryParseError(SceneNavError):
    """A geometry file failed to parse.

    Carries the location of the failure so callers can report it.
    """

    def __init__(self, message, path=None, line=None, offset=None):
        self.path = path
        self.line = line
        self.offset = offset
        loc = []
        if path is not None:
            loc.append(str(path))
        if line is not None:
            loc.append(f"line {line}")
        if offset is not None:
            loc.append(f"byte {offset}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)


class EmptyGeometryError(SceneNavError):
    """A file parsed but contained no usable geometry."""


class OutOfBoundsError(SceneNavError):
    """A world position fell outside the obstacle map.

    ``nearest`` holds the closest in-bounds grid cell so interactive
    callers can snap the position back.
    """

    def __init__(self, position, nearest):
        self.position = position
        self.nearest = nearest
        super().__init__(
            f"position {position} outside map bounds; nearest cell {nearest}"
        )


class InvalidNodeError(SceneNavError):
    """A start/goal keypoint landed on an obstacle cell."""

    def __init__(self, nodes, segment=None):
        self.nodes = list(nodes)
        self.segment = segment
        msg = f"keypoints on obstacle cells: {self.nodes}"
        if segment is not None:
            msg += f" (segment {segment})"
        super().__init__(msg)


class NoPathError(SceneNavError):
    """A* exhausted its open set without reaching the goal."""

    def __init__(self, start, goal, explored, segment=None):
        self.start = start
        self.goal = goal
        self.explored = explored  # number of expanded nodes
        self.segment = segment
        msg = f"no path from {start} to {goal} ({explored} nodes explored)"
        if segment is not None:
            msg += f" (segment {segment})"
        super().__init__(msg)


class SchemaError(SceneNavError):
    """A structured input file did not match its documented schema."""


class GuidanceError(SceneNavError):
    """A guidance step produced or received invalid numerics."""

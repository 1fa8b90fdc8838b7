"""Scene-aware navigation and spatial-guidance toolkit."""

from .errors import (
    EmptyGeometryError,
    GeometryParseError,
    GuidanceError,
    InvalidNodeError,
    NoPathError,
    OutOfBoundsError,
    SceneNavError,
    SchemaError,
)
from .geometry import (
    CropVolume,
    PointCloud,
    TriMesh,
    crop_volume_for_object,
    volumetric_sample,
)
from .guidance import (
    AnchorTuple,
    GuidanceParams,
    SkeletonPose,
    TrajectoryState,
    guided_update,
)
from .obstacle_map import GridCoord, ObstacleMap, build_map, smooth_map
from .planner import PathPlan, PlannerConfig, astar_segment, bresenham, plan_path
from .sdf import SdfScene

__all__ = [
    "AnchorTuple",
    "CropVolume",
    "EmptyGeometryError",
    "GeometryParseError",
    "GridCoord",
    "GuidanceError",
    "GuidanceParams",
    "InvalidNodeError",
    "NoPathError",
    "ObstacleMap",
    "OutOfBoundsError",
    "PathPlan",
    "PlannerConfig",
    "PointCloud",
    "SceneNavError",
    "SchemaError",
    "SdfScene",
    "SkeletonPose",
    "TriMesh",
    "TrajectoryState",
    "astar_segment",
    "bresenham",
    "build_map",
    "crop_volume_for_object",
    "guided_update",
    "plan_path",
    "smooth_map",
    "volumetric_sample",
]

__version__ = "0.1.0"

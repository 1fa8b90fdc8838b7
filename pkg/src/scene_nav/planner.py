"""Grid path planning with a dual-component heuristic.

A* over 4-connected cells. The guidance cost of a node combines the
Euclidean distance to the goal with a density penalty: the sum of map
values along the Bresenham line from the node to the goal, weighted by
``lam``. The same weight scales the density part of the step cost
(1 + lam * density at the entered cell), so the heuristic approximates
the cost of walking the straight line and lam directly controls how
hard plans avoid dense cells. lam=0 degenerates to unit-cost shortest
paths. See PlannerConfig.strict_density for the pure-density variant.
"""

import heapq
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidNodeError, NoPathError, OutOfBoundsError
from .obstacle_map import GridCoord, ObstacleMap

DEFAULT_BASE_HEIGHT = 0.95
DEFAULT_FRAME_INTERVAL = 38
DEFAULT_STRIDE = 4

_NEIGHBORS = ((1, 0), (-1, 0), (0, 1), (0, -1))


@dataclass(frozen=True)
class PlannerConfig:
    """Planner knobs.

    lam: weight of the density term, in both the heuristic and the
        step cost (step = 1 + lam * density of the entered cell).
    strict_density: use the bare unweighted density step cost (no unit
        move cost); kept for fidelity experiments, loses admissibility
        on flat floor.
    impassable: cells with value >= this threshold are never entered
        (None = traversal is purely cost-based).
    """

    lam: float = 0.0
    strict_density: bool = False
    impassable: float | None = None

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be >= 0")


def bresenham(a, b):
    """Integer Bresenham line from a to b, both endpoints included."""
    x0, y0 = (a.i, a.j) if isinstance(a, GridCoord) else a
    x1, y1 = (b.i, b.j) if isinstance(b, GridCoord) else b
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x1 > x0 else -1
    sy = 1 if y1 > y0 else -1
    err = dx + dy
    out = []
    while True:
        out.append(GridCoord(x0, y0))
        if x0 == x1 and y0 == y1:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy
    return out


def heuristic(obstacle_map: ObstacleMap, a, b, cfg: PlannerConfig):
    """Euclidean distance (cell units) + lam * density along the line."""
    d = math.hypot(a.i - b.i, a.j - b.j)
    if cfg.lam == 0.0:
        return d
    density = sum(obstacle_map.values[c.i, c.j] for c in bresenham(a, b))
    return d + cfg.lam * density


def astar_segment(obstacle_map: ObstacleMap, start, goal, cfg=PlannerConfig()):
    """Dense 4-connected path from start to goal.

    Raises InvalidNodeError when either endpoint sits on an obstacle
    cell, NoPathError when the open set runs dry.
    """
    bad = [c for c in (start, goal) if not obstacle_map.walkable(c)]
    if bad:
        raise InvalidNodeError([c.as_tuple() for c in bad])
    if start == goal:
        return [start]

    values = obstacle_map.values
    nx, ny = values.shape
    counter = itertools.count()  # FIFO tie-break for equal keys
    g = {start.as_tuple(): 0.0}
    came = {start.as_tuple(): None}
    open_set = [(heuristic(obstacle_map, start, goal, cfg), next(counter), start)]
    goal_t = goal.as_tuple()

    while open_set:
        key, _, node = heapq.heappop(open_set)
        node_t = node.as_tuple()
        node_g = g[node_t]
        if node_t == goal_t:
            path = []
            cur = goal_t
            while cur is not None:
                path.append(GridCoord(*cur))
                cur = came[cur]
            path.reverse()
            return path
        for di, dj in _NEIGHBORS:
            ni, nj = node_t[0] + di, node_t[1] + dj
            if not (0 <= ni < nx and 0 <= nj < ny):
                continue
            v = values[ni, nj]
            if cfg.impassable is not None and v >= cfg.impassable:
                continue
            step = v if cfg.strict_density else 1.0 + cfg.lam * v
            tentative = node_g + step
            if tentative < g.get((ni, nj), math.inf):
                g[(ni, nj)] = tentative
                came[(ni, nj)] = node_t
                nbr = GridCoord(ni, nj)
                f = heuristic(obstacle_map, nbr, goal, cfg)
                heapq.heappush(open_set, (tentative + f, next(counter), nbr))
    raise NoPathError(start.as_tuple(), goal.as_tuple(), explored=len(g))


def douglas_peucker(coords, tolerance):
    """Simplify a polyline of GridCoords; tolerance in cell units."""
    if len(coords) < 3:
        return list(coords)
    pts = np.array([[c.i, c.j] for c in coords], dtype=np.float64)
    keep = np.zeros(len(pts), dtype=bool)
    keep[0] = keep[-1] = True
    stack = [(0, len(pts) - 1)]
    while stack:
        lo, hi = stack.pop()
        if hi <= lo + 1:
            continue
        seg = pts[hi] - pts[lo]
        norm = np.linalg.norm(seg)
        rel = pts[lo + 1 : hi] - pts[lo]
        if norm == 0:
            dists = np.linalg.norm(rel, axis=1)
        else:
            dists = np.abs(rel[:, 0] * seg[1] - rel[:, 1] * seg[0]) / norm
        k = int(np.argmax(dists))
        if dists[k] > tolerance:
            mid = lo + 1 + k
            keep[mid] = True
            stack.extend([(lo, mid), (mid, hi)])
    return [c for c, k in zip(coords, keep) if k]


def downsample_and_lift(
    dense,
    obstacle_map: ObstacleMap,
    base_height=DEFAULT_BASE_HEIGHT,
    stride=DEFAULT_STRIDE,
    heights=None,
    simplify_tolerance=None,
):
    """Subsample the dense path and lift it back to world 3D.

    Keeps every stride-th cell plus both endpoints; an optional
    Douglas-Peucker pass (tolerance in cells) provides the adaptive
    mode. z defaults to base_height, overridable per waypoint through
    ``heights`` (index -> z) for skills with adjusted root heights.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if simplify_tolerance is not None:
        picked = douglas_peucker(dense, simplify_tolerance)
    else:
        idx = list(range(0, len(dense), stride))
        if idx[-1] != len(dense) - 1:
            idx.append(len(dense) - 1)
        picked = [dense[k] for k in idx]
    out = np.empty((len(picked), 3))
    for k, cell in enumerate(picked):
        xy = obstacle_map.grid_to_world(cell)
        z = base_height
        if heights is not None and k in heights:
            z = heights[k]
        out[k] = (xy[0], xy[1], z)
    return out


def schedule_frames(n_waypoints, interval=DEFAULT_FRAME_INTERVAL):
    """Waypoint k is applied at frame k*interval.

    Decrease the interval to walk faster, increase it to slow down.
    """
    if interval < 1:
        raise ValueError("interval must be >= 1")
    return [k * interval for k in range(n_waypoints)]


def validate_keypoints(obstacle_map: ObstacleMap, keypoints):
    """Classify each world keypoint as walkable / obstacle / out_of_bounds.

    Non-walkable entries carry the nearest walkable cell (BFS over the
    grid) as a repositioning suggestion for the adjustment flow.
    """
    results = []
    for p in np.asarray(keypoints, dtype=np.float64).reshape(-1, np.shape(keypoints)[-1]):
        try:
            cell = obstacle_map.world_to_grid(p[:2])
        except OutOfBoundsError as exc:
            results.append(
                {
                    "status": "out_of_bounds",
                    "cell": None,
                    "suggestion": _nearest_walkable(obstacle_map, exc.nearest),
                }
            )
            continue
        if obstacle_map.walkable(cell):
            results.append({"status": "walkable", "cell": cell.as_tuple(), "suggestion": None})
        else:
            results.append(
                {
                    "status": "obstacle",
                    "cell": cell.as_tuple(),
                    "suggestion": _nearest_walkable(obstacle_map, cell),
                }
            )
    return results


def _nearest_walkable(obstacle_map, cell):
    from collections import deque

    nx, ny = obstacle_map.values.shape
    seen = {cell.as_tuple()}
    queue = deque([cell.as_tuple()])
    while queue:
        i, j = queue.popleft()
        if obstacle_map.values[i, j] == 0:
            return (i, j)
        for di, dj in _NEIGHBORS:
            ni, nj = i + di, j + dj
            if 0 <= ni < nx and 0 <= nj < ny and (ni, nj) not in seen:
                seen.add((ni, nj))
                queue.append((ni, nj))
    return None


@dataclass(frozen=True)
class PathPlan:
    """Output of plan_path: dense grid path, sparse lifted waypoints,
    per-waypoint frame schedule, and per-segment bookkeeping."""

    dense_path: list
    sparse_path: np.ndarray
    frame_schedule: list
    segments: list  # dicts: start_index into dense_path, cost
    config: dict = field(default_factory=dict)

    def to_json_bytes(self):
        doc = {
            "schema": "scene-nav/plan/1",
            "dense_path": [c.as_tuple() for c in self.dense_path],
            "sparse_waypoints": [[round(v, 9) for v in row] for row in self.sparse_path.tolist()],
            "frame_schedule": list(self.frame_schedule),
            "segments": self.segments,
            "config": self.config,
        }
        return (json.dumps(doc, indent=2, sort_keys=False) + "\n").encode("ascii")

    @staticmethod
    def from_json_bytes(data):
        doc = json.loads(data)
        return PathPlan(
            dense_path=[GridCoord(i, j) for i, j in doc["dense_path"]],
            sparse_path=np.array(doc["sparse_waypoints"], dtype=np.float64).reshape(-1, 3),
            frame_schedule=list(doc["frame_schedule"]),
            segments=doc["segments"],
            config=doc.get("config", {}),
        )


def plan_path(
    obstacle_map: ObstacleMap,
    keypoints,
    cfg=PlannerConfig(),
    stride=DEFAULT_STRIDE,
    base_height=DEFAULT_BASE_HEIGHT,
    frame_interval=DEFAULT_FRAME_INTERVAL,
    heights=None,
    simplify_tolerance=None,
):
    """Chain A* over consecutive keypoint pairs and lift the result.

    Keypoints are world positions (2D or 3D; z is ignored for planning).
    Segment endpoints shared between consecutive segments appear once in
    the dense path.
    """
    keypoints = np.asarray(keypoints, dtype=np.float64)
    if keypoints.shape[0] < 2:
        raise ValueError("need at least 2 keypoints")
    checks = validate_keypoints(obstacle_map, keypoints)
    bad = [k for k, c in enumerate(checks) if c["status"] != "walkable"]
    if bad:
        raise InvalidNodeError(bad)
    nodes = [GridCoord(*c["cell"]) for c in checks]

    dense = []
    segments = []
    for s in range(len(nodes) - 1):
        try:
            seg = astar_segment(obstacle_map, nodes[s], nodes[s + 1], cfg)
        except NoPathError as exc:
            raise NoPathError(exc.start, exc.goal, exc.explored, segment=s) from None
        cost = _path_cost(obstacle_map, seg, cfg)
        segments.append({"start_index": len(dense), "cost": cost})
        if dense and seg[0] == dense[-1]:
            seg = seg[1:]
        dense.extend(seg)

    sparse = downsample_and_lift(
        dense,
        obstacle_map,
        base_height=base_height,
        stride=stride,
        heights=heights,
        simplify_tolerance=simplify_tolerance,
    )
    schedule = schedule_frames(sparse.shape[0], frame_interval)
    return PathPlan(
        dense_path=dense,
        sparse_path=sparse,
        frame_schedule=schedule,
        segments=segments,
        config={
            "lam": cfg.lam,
            "strict_density": cfg.strict_density,
            "impassable": cfg.impassable,
            "stride": stride,
            "base_height": base_height,
            "frame_interval": frame_interval,
            "cell_size": obstacle_map.cell_size,
        },
    )


def _path_cost(obstacle_map, path, cfg):
    cost = 0.0
    for c in path[1:]:
        v = obstacle_map.values[c.i, c.j]
        cost += v if cfg.strict_density else 1.0 + cfg.lam * v
    return cost


def path_density_sum(obstacle_map, path):
    """Sum of map values over a path's cells (regression metric)."""
    return float(sum(obstacle_map.values[c.i, c.j] for c in path))

"""2D obstacle-aware maps: vertical point-count grids over a scene's
xy footprint, box-filter smoothing, and world<->grid transforms."""

import io as _io
from dataclasses import dataclass, field

import numpy as np
from PIL import Image
from scipy.ndimage import uniform_filter

from .errors import OutOfBoundsError
from .geometry import PointCloud

DEFAULT_CELL_SIZE = 0.1
DEFAULT_Z_BAND = (0.2, 2.0)


@dataclass(frozen=True)
class GridCoord:
    i: int
    j: int

    def as_tuple(self):
        return (self.i, self.j)


@dataclass(frozen=True)
class ObstacleMap:
    """Grid of per-cell point counts (raw) or smoothed densities.

    ``values[i, j]`` covers the world square
    [origin_x + i*cell, origin_x + (i+1)*cell) x [origin_y + j*cell, ...).
    Cells with value 0 are walkable. Immutable after construction.
    """

    origin: np.ndarray  # world (x, y) of the corner of cell (0, 0)
    cell_size: float
    values: np.ndarray  # (nx, ny), non-negative
    z_band: tuple = DEFAULT_Z_BAND
    empty_input: bool = field(default=False)

    def __post_init__(self):
        object.__setattr__(
            self, "origin", np.asarray(self.origin, dtype=np.float64).reshape(2)
        )
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2 or np.any(vals < 0):
            raise ValueError("values must be a non-negative 2D grid")
        object.__setattr__(self, "values", vals)

    @property
    def shape(self):
        return self.values.shape

    def in_bounds(self, coord):
        i, j = (coord.i, coord.j) if isinstance(coord, GridCoord) else coord
        return 0 <= i < self.values.shape[0] and 0 <= j < self.values.shape[1]

    def value_at(self, coord):
        return float(self.values[coord.i, coord.j])

    def walkable(self, coord):
        return self.value_at(coord) == 0.0

    def world_to_grid(self, position):
        """Floor-quantize a world (x, y) position to its grid cell.

        Out-of-bounds positions raise OutOfBoundsError carrying the
        nearest in-bounds cell for the interactive adjustment flow.
        """
        p = np.asarray(position, dtype=np.float64).reshape(-1)[:2]
        ij = np.floor((p - self.origin) / self.cell_size).astype(int)
        nx, ny = self.values.shape
        if not (0 <= ij[0] < nx and 0 <= ij[1] < ny):
            nearest = GridCoord(
                int(np.clip(ij[0], 0, nx - 1)), int(np.clip(ij[1], 0, ny - 1))
            )
            raise OutOfBoundsError(tuple(p), nearest)
        return GridCoord(int(ij[0]), int(ij[1]))

    def grid_to_world(self, coord):
        """World (x, y) of the cell center."""
        i, j = (coord.i, coord.j) if isinstance(coord, GridCoord) else coord
        return self.origin + (np.array([i, j], dtype=np.float64) + 0.5) * self.cell_size


def build_map(cloud: PointCloud, cell_size=DEFAULT_CELL_SIZE, z_band=DEFAULT_Z_BAND):
    """Count scene points per cell within the z band.

    Only points with z strictly inside (z_min, z_max) count, which drops
    the floor and the ceiling. The grid covers the xy bounding box of
    the full cloud padded by one cell per side so border paths exist.
    """
    if cell_size <= 0:
        raise ValueError("cell_size must be positive")
    z_min, z_max = z_band
    if not z_min < z_max:
        raise ValueError("z_band must satisfy z_min < z_max")
    pts = cloud.points
    if pts.shape[0] == 0:
        return ObstacleMap(
            origin=np.zeros(2),
            cell_size=cell_size,
            values=np.zeros((1, 1)),
            z_band=(z_min, z_max),
            empty_input=True,
        )
    origin = pts[:, :2].min(axis=0) - cell_size
    # quantize every point once, then renumber in integer space so the
    # grid always keeps one empty padding cell per side regardless of
    # floating-point noise in the min/max subtraction
    ij_all = np.floor((pts[:, :2] - origin) / cell_size).astype(int)
    lo = ij_all.min(axis=0)
    hi = ij_all.max(axis=0)
    origin = origin + (lo - 1) * cell_size
    ij_all -= lo - 1
    nx, ny = (hi - lo + 1) + 2

    keep = (pts[:, 2] > z_min) & (pts[:, 2] < z_max)
    ij = ij_all[keep]
    values = np.zeros((nx, ny))
    np.add.at(values, (ij[:, 0], ij[:, 1]), 1.0)
    return ObstacleMap(
        origin=origin, cell_size=cell_size, values=values, z_band=(z_min, z_max)
    )


def smooth_map(obstacle_map: ObstacleMap, kernel_radius=1):
    """Zero-padded box-filter blur; radius 0 returns the map unchanged."""
    if kernel_radius < 0:
        raise ValueError("kernel_radius must be >= 0")
    if kernel_radius == 0:
        return obstacle_map
    smoothed = uniform_filter(
        obstacle_map.values, size=2 * kernel_radius + 1, mode="constant", cval=0.0
    )
    smoothed = np.maximum(smoothed, 0.0)  # guard fp noise
    return ObstacleMap(
        origin=obstacle_map.origin,
        cell_size=obstacle_map.cell_size,
        values=smoothed,
        z_band=obstacle_map.z_band,
        empty_input=obstacle_map.empty_input,
    )


def map_csv_bytes(obstacle_map: ObstacleMap):
    """CSV form: header line, then one row per x index, %.6f entries."""
    nx, ny = obstacle_map.values.shape
    lines = [
        "cells=%dx%d cell_size=%s origin=%s,%s"
        % (
            nx,
            ny,
            format(obstacle_map.cell_size, "g"),
            format(obstacle_map.origin[0], "g"),
            format(obstacle_map.origin[1], "g"),
        )
    ]
    for i in range(nx):
        lines.append(",".join("%.6f" % v for v in obstacle_map.values[i]))
    return ("\n".join(lines) + "\n").encode("ascii")


def parse_map_csv(data):
    """Inverse of map_csv_bytes."""
    text = data.decode("ascii") if isinstance(data, bytes) else data
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = dict(tok.split("=", 1) for tok in lines[0].split())
    nx, ny = (int(t) for t in header["cells"].split("x"))
    ox, oy = (float(t) for t in header["origin"].split(","))
    values = np.array(
        [[float(tok) for tok in ln.split(",")] for ln in lines[1 : 1 + nx]]
    )
    if values.shape != (nx, ny):
        raise ValueError("CSV grid does not match declared dims")
    return ObstacleMap(
        origin=np.array([ox, oy]), cell_size=float(header["cell_size"]), values=values
    )


def heatmap_png_bytes(obstacle_map: ObstacleMap):
    """Greyscale max-normalized PNG; rows top-to-bottom are decreasing y."""
    vals = obstacle_map.values
    peak = vals.max()
    img = np.zeros(vals.shape, dtype=np.uint8)
    if peak > 0:
        img = np.round(vals / peak * 255.0).astype(np.uint8)
    # transpose so image x is world x, then flip so +y points up
    raster = np.flipud(img.T)
    buf = _io.BytesIO()
    Image.fromarray(raster, mode="L").save(buf, format="PNG")
    return buf.getvalue()


def export_heatmap(obstacle_map: ObstacleMap, csv_path, image_path=None):
    """Write the CSV grid and (optionally) the greyscale heatmap image."""
    with open(csv_path, "wb") as fh:
        fh.write(map_csv_bytes(obstacle_map))
    if image_path is not None:
        with open(image_path, "wb") as fh:
            fh.write(heatmap_png_bytes(obstacle_map))

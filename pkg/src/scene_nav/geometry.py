"""Geometric substrate: point clouds, triangle meshes, crop volumes,
volumetric sampling, and point-in-mesh parity tests."""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import EmptyGeometryError

# fallback ray directions for parity tests; deliberately irrational-ish so
# axis-aligned geometry rarely produces grazing hits
_PARITY_DIRECTIONS = np.array(
    [
        [0.57733627, 0.57742382, 0.57734053],
        [-0.26726124, 0.53452248, 0.80178373],
        [0.85811633, -0.19069252, -0.47673129],
        [0.12309149, 0.90481105, -0.40761922],
        [-0.74535599, -0.29814240, 0.59628480],
    ]
)


def _as_points(points):
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        return pts.reshape(0, 3)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"expected (N, 3) points, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("non-finite coordinates in point set")
    return pts


@dataclass(frozen=True)
class PointCloud:
    """Unordered set of 3D positions in meters, z-up. May be empty."""

    points: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", _as_points(self.points))

    def __len__(self):
        return self.points.shape[0]

    def translated(self, offset):
        return PointCloud(self.points + np.asarray(offset, dtype=np.float64))


@dataclass(frozen=True)
class TriMesh:
    """Triangle mesh; degenerate (zero-area) faces are dropped on load."""

    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        verts = _as_points(self.vertices)
        faces = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        if faces.size and (faces.min() < 0 or faces.max() >= len(verts)):
            raise ValueError("face index out of range")
        if faces.size:
            tris = verts[faces]
            areas = 0.5 * np.linalg.norm(
                np.cross(tris[:, 1] - tris[:, 0], tris[:, 2] - tris[:, 0]), axis=1
            )
            faces = faces[areas > 0.0]
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "faces", faces)

    @property
    def triangles(self):
        """Face vertex coordinates, shape (F, 3, 3)."""
        return self.vertices[self.faces]

    def face_areas(self):
        t = self.triangles
        return 0.5 * np.linalg.norm(
            np.cross(t[:, 1] - t[:, 0], t[:, 2] - t[:, 0]), axis=1
        )

    def is_watertight(self):
        """True when every undirected edge is shared by exactly two faces."""
        if self.faces.size == 0:
            return False
        edges = np.concatenate(
            [self.faces[:, [0, 1]], self.faces[:, [1, 2]], self.faces[:, [2, 0]]]
        )
        edges = np.sort(edges, axis=1)
        _, counts = np.unique(edges, axis=0, return_counts=True)
        return bool(np.all(counts == 2))

    def transformed(self, rotation=None, translation=None):
        verts = self.vertices
        if rotation is not None:
            verts = verts @ np.asarray(rotation, dtype=np.float64).T
        if translation is not None:
            verts = verts + np.asarray(translation, dtype=np.float64)
        return TriMesh(verts, self.faces)


@dataclass(frozen=True)
class CropVolume:
    """Axis-aligned box, max strictly greater than min componentwise."""

    vmin: np.ndarray
    vmax: np.ndarray

    def __post_init__(self):
        vmin = np.asarray(self.vmin, dtype=np.float64).reshape(3)
        vmax = np.asarray(self.vmax, dtype=np.float64).reshape(3)
        if not np.all(vmax > vmin):
            raise ValueError(f"degenerate crop volume: {vmin} .. {vmax}")
        object.__setattr__(self, "vmin", vmin)
        object.__setattr__(self, "vmax", vmax)

    def contains(self, points):
        pts = np.asarray(points, dtype=np.float64)
        return np.all((pts >= self.vmin) & (pts <= self.vmax), axis=-1)


# half-extent of the xy footprint and the fixed z band of the local scene
# context box around an object
CROP_HALF_XY = 0.8
CROP_Z_MIN = 0.2
CROP_Z_MAX = 1.8


def crop_volume_for_object(object_translation):
    """Local scene context box around an object translation.

    xy extends +-0.8 m around the object; z is fixed to [0.2, 1.8] m
    regardless of the object's height.
    """
    t = np.asarray(object_translation, dtype=np.float64).reshape(3)
    if not np.all(np.isfinite(t)):
        raise ValueError("non-finite object translation")
    return CropVolume(
        [t[0] - CROP_HALF_XY, t[1] - CROP_HALF_XY, CROP_Z_MIN],
        [t[0] + CROP_HALF_XY, t[1] + CROP_HALF_XY, CROP_Z_MAX],
    )


def parity_inside(points, triangles):
    """Point-in-mesh test by ray-crossing parity (odd = inside).

    Grazing hits are resolved by retrying with alternate ray directions.
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    crossings = np.zeros(points.shape[0], dtype=np.int64)
    pending = np.ones(points.shape[0], dtype=bool)
    for direction in _PARITY_DIRECTIONS:
        idx = np.nonzero(pending)[0]
        if idx.size == 0:
            break
        c, suspect = _kernels.ray_crossings(points[idx], triangles, direction)
        crossings[idx] = c
        pending[idx] = suspect
    # any still-suspect point keeps its last parity estimate
    return crossings % 2 == 1


@dataclass(frozen=True)
class VolumetricSample:
    """Result of volumetric_sample: surface+interior cloud, plus a flag
    recording that interior sampling was skipped for an open mesh."""

    cloud: PointCloud
    interior_skipped: bool = field(default=False)


def voxel_centers(volume, voxel_edge):
    """Voxel lattice anchored at the volume center, strictly interior.

    Anchoring at the center keeps the lattice symmetric under volume
    translation; points on the volume boundary are excluded.
    """
    axes = []
    for k in range(3):
        mid = 0.5 * (volume.vmin[k] + volume.vmax[k])
        lo = int(np.ceil((volume.vmin[k] - mid) / voxel_edge - 1e-12))
        hi = int(np.floor((volume.vmax[k] - mid) / voxel_edge + 1e-12))
        coords = mid + np.arange(lo, hi + 1) * voxel_edge
        coords = coords[
            (coords > volume.vmin[k] + 1e-12) & (coords < volume.vmax[k] - 1e-12)
        ]
        axes.append(coords)
    gx, gy, gz = np.meshgrid(*axes, indexing="ij")
    return np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=1)


def volumetric_sample(mesh, volume, voxel_edge=0.08, seed=0):
    """Dense cloud of surface samples plus interior voxel centers.

    Surface samples are area-weighted over faces, restricted to the
    volume; interior points are voxel centers passing the parity
    inside-test. Open meshes skip interior sampling and set the
    ``interior_skipped`` flag.
    """
    if voxel_edge <= 0:
        raise ValueError("voxel_edge must be positive")
    rng = np.random.default_rng(seed)
    tris = mesh.triangles
    parts = []

    if tris.shape[0]:
        # surface: mesh vertices inside the box, plus random barycentric
        # samples on faces whose AABB touches the box
        inside_verts = mesh.vertices[volume.contains(mesh.vertices)]
        if inside_verts.size:
            parts.append(inside_verts)
        lo = tris.min(axis=1)
        hi = tris.max(axis=1)
        touching = np.all(hi >= volume.vmin, axis=1) & np.all(
            lo <= volume.vmax, axis=1
        )
        cand = tris[touching]
        if cand.shape[0]:
            areas = 0.5 * np.linalg.norm(
                np.cross(cand[:, 1] - cand[:, 0], cand[:, 2] - cand[:, 0]), axis=1
            )
            counts = np.ceil(areas / (voxel_edge * voxel_edge)).astype(int)
            reps = np.repeat(np.arange(cand.shape[0]), counts)
            u = rng.random(reps.size)
            v = rng.random(reps.size)
            flip = u + v > 1.0
            u[flip] = 1.0 - u[flip]
            v[flip] = 1.0 - v[flip]
            t = cand[reps]
            pts = (
                t[:, 0]
                + u[:, None] * (t[:, 1] - t[:, 0])
                + v[:, None] * (t[:, 2] - t[:, 0])
            )
            pts = pts[volume.contains(pts)]
            if pts.size:
                parts.append(pts)

    interior_skipped = False
    if tris.shape[0]:
        if mesh.is_watertight():
            centers = voxel_centers(volume, voxel_edge)
            if centers.shape[0]:
                inside = parity_inside(centers, tris)
                if inside.any():
                    parts.append(centers[inside])
        else:
            interior_skipped = True

    if parts:
        cloud = PointCloud(np.concatenate(parts, axis=0))
    else:
        cloud = PointCloud(np.zeros((0, 3)))
    return VolumetricSample(cloud=cloud, interior_skipped=interior_skipped)


def require_nonempty(cloud, what="point cloud"):
    if len(cloud) == 0:
        raise EmptyGeometryError(f"empty {what}")
    return cloud

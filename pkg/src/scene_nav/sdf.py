"""Signed distance queries against triangle meshes.

Sign comes from a ray-parity inside test, magnitude from the closest
point over all triangles. Open meshes fall back to unsigned distances
and set a warning flag on the scene.
"""

import warnings

import numpy as np

from . import _kernels
from .geometry import TriMesh, parity_inside


class SdfScene:
    """Immutable signed-distance oracle over a triangle mesh.

    phi(v) < 0 strictly inside, > 0 strictly outside, |phi| equal to the
    Euclidean distance to the surface. Queries are read-only and safe
    for concurrent callers.
    """

    def __init__(self, mesh: TriMesh):
        if mesh.faces.shape[0] == 0:
            raise ValueError("SdfScene needs a mesh with faces")
        self.mesh = mesh
        self._tris = np.ascontiguousarray(mesh.triangles)
        self.watertight = mesh.is_watertight()
        if not self.watertight:
            warnings.warn(
                "mesh is not watertight; distances will be unsigned",
                stacklevel=2,
            )

    def distance(self, points):
        """Unsigned distance to the surface for (N, 3) or (3,) input."""
        pts = np.asarray(points, dtype=np.float64)
        single = pts.ndim == 1
        d = _kernels.point_mesh_distance(pts.reshape(-1, 3), self._tris)
        return float(d[0]) if single else d

    def inside(self, points):
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        if not self.watertight:
            return np.zeros(pts.shape[0], dtype=bool)
        return parity_inside(pts, self._tris)

    def sdf(self, points):
        """Signed distance; sign is only meaningful for closed meshes."""
        pts = np.asarray(points, dtype=np.float64)
        single = pts.ndim == 1
        flat = pts.reshape(-1, 3)
        d = _kernels.point_mesh_distance(flat, self._tris)
        if self.watertight:
            d = np.where(self.inside(flat), -d, d)
        return float(d[0]) if single else d


def penetration_score(scene: SdfScene, points):
    """Sum of |phi| over points strictly inside the scene.

    Shared by pose filtering and the per-frame penetration-volume
    metric so the two stay numerically identical.
    """
    phi = scene.sdf(np.asarray(points, dtype=np.float64).reshape(-1, 3))
    return float(np.sum(np.abs(phi[phi < 0.0])))

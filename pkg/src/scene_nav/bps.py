"""Basis point set encoding and nearest-surface directional offsets."""

import numpy as np
from scipy.spatial import cKDTree

from .errors import EmptyGeometryError
from .geometry import PointCloud

BPS_SIZE = 1024
BPS_RADIUS = 1.2
BPS_SEED = 0


def make_basis(center, n=BPS_SIZE, radius=BPS_RADIUS, seed=BPS_SEED):
    """Fixed basis: n points uniform inside a ball around ``center``.

    The seed is part of the encoding contract and must be recorded next
    to any stored encodings.
    """
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(n, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    r = radius * rng.random(n) ** (1.0 / 3.0)
    return np.asarray(center, dtype=np.float64) + dirs * r[:, None]


def bps_encode(cloud: PointCloud, basis):
    """Distance from each basis point to its nearest cloud point."""
    if len(cloud) == 0:
        raise EmptyGeometryError("BPS encoding undefined for an empty cloud")
    basis = np.asarray(basis, dtype=np.float64)
    tree = cKDTree(cloud.points)
    dists, _ = tree.query(basis)
    return np.asarray(dists, dtype=np.float64)


def directional_offsets(body_vertices, target: PointCloud):
    """Per-vertex vector to the nearest target point (nearest - vertex)."""
    if len(target) == 0:
        raise EmptyGeometryError("offsets undefined for an empty target cloud")
    verts = np.asarray(body_vertices, dtype=np.float64).reshape(-1, 3)
    tree = cKDTree(target.points)
    _, idx = tree.query(verts)
    return target.points[idx] - verts


def farthest_point_sample(points, n, seed=0):
    """Deterministic farthest-point subsampling down to n points."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if pts.shape[0] <= n:
        return np.arange(pts.shape[0])
    rng = np.random.default_rng(seed)
    chosen = np.empty(n, dtype=np.int64)
    chosen[0] = rng.integers(pts.shape[0])
    dist = np.linalg.norm(pts - pts[chosen[0]], axis=1)
    for k in range(1, n):
        chosen[k] = int(np.argmax(dist))
        dist = np.minimum(dist, np.linalg.norm(pts - pts[chosen[k]], axis=1))
    return chosen

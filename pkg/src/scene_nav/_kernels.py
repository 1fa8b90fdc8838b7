"""Numeric inner loops with two interchangeable backends.

The numba backend compiles the per-triangle loops with ``@njit``; the
fallback is vectorized numpy, chunked over query points to bound memory.
Set ``SCENE_NAV_NUMBA=0`` to force the numpy path (useful for debugging
and for the backend-comparison benchmark).
"""

import os

import numpy as np

_env = os.environ.get("SCENE_NAV_NUMBA", "1").strip().lower()
NUMBA_ENABLED = _env not in ("0", "false", "off", "no")

if NUMBA_ENABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        NUMBA_ENABLED = False

_CHUNK = 64  # query points per numpy-backend chunk


# ---------------------------------------------------------------------------
# point -> triangle-soup unsigned distance
#
# Per triangle the distance is min(three point-segment distances, and the
# plane distance when the projection falls inside the triangle).


def _point_tris_min_dist_loop(p, tris):
    best = np.inf
    for t in range(tris.shape[0]):
        a0 = tris[t, 0, 0]
        a1 = tris[t, 0, 1]
        a2 = tris[t, 0, 2]
        b0 = tris[t, 1, 0]
        b1 = tris[t, 1, 1]
        b2 = tris[t, 1, 2]
        c0 = tris[t, 2, 0]
        c1 = tris[t, 2, 1]
        c2 = tris[t, 2, 2]
        # three edge segments
        for k in range(3):
            if k == 0:
                s0, s1, s2, e0, e1, e2 = a0, a1, a2, b0, b1, b2
            elif k == 1:
                s0, s1, s2, e0, e1, e2 = b0, b1, b2, c0, c1, c2
            else:
                s0, s1, s2, e0, e1, e2 = c0, c1, c2, a0, a1, a2
            d0 = e0 - s0
            d1 = e1 - s1
            d2 = e2 - s2
            w0 = p[0] - s0
            w1 = p[1] - s1
            w2 = p[2] - s2
            dd = d0 * d0 + d1 * d1 + d2 * d2
            if dd > 0.0:
                u = (w0 * d0 + w1 * d1 + w2 * d2) / dd
                if u < 0.0:
                    u = 0.0
                elif u > 1.0:
                    u = 1.0
            else:
                u = 0.0
            q0 = w0 - u * d0
            q1 = w1 - u * d1
            q2 = w2 - u * d2
            d = np.sqrt(q0 * q0 + q1 * q1 + q2 * q2)
            if d < best:
                best = d
        # interior projection
        e10 = b0 - a0
        e11 = b1 - a1
        e12 = b2 - a2
        e20 = c0 - a0
        e21 = c1 - a1
        e22 = c2 - a2
        n0 = e11 * e22 - e12 * e21
        n1 = e12 * e20 - e10 * e22
        n2 = e10 * e21 - e11 * e20
        nn = n0 * n0 + n1 * n1 + n2 * n2
        if nn > 0.0:
            w0 = p[0] - a0
            w1 = p[1] - a1
            w2 = p[2] - a2
            dist_n = w0 * n0 + w1 * n1 + w2 * n2
            # barycentric of the in-plane projection
            q0 = w0 - dist_n * n0 / nn
            q1 = w1 - dist_n * n1 / nn
            q2 = w2 - dist_n * n2 / nn
            d11 = e10 * e10 + e11 * e11 + e12 * e12
            d12 = e10 * e20 + e11 * e21 + e12 * e22
            d22 = e20 * e20 + e21 * e21 + e22 * e22
            q1d = q0 * e10 + q1 * e11 + q2 * e12
            q2d = q0 * e20 + q1 * e21 + q2 * e22
            den = d11 * d22 - d12 * d12
            if den > 0.0:
                u = (d22 * q1d - d12 * q2d) / den
                v = (d11 * q2d - d12 * q1d) / den
                if u >= 0.0 and v >= 0.0 and u + v <= 1.0:
                    d = abs(dist_n) / np.sqrt(nn)
                    if d < best:
                        best = d
    return best


def _point_mesh_distance_loop(points, tris, out):
    for i in range(points.shape[0]):
        out[i] = _point_tris_min_dist_loop(points[i], tris)


def _point_mesh_distance_numpy(points, tris):
    out = np.empty(points.shape[0])
    a = tris[:, 0, :]
    edges = (
        (tris[:, 0, :], tris[:, 1, :]),
        (tris[:, 1, :], tris[:, 2, :]),
        (tris[:, 2, :], tris[:, 0, :]),
    )
    e1 = tris[:, 1, :] - a
    e2 = tris[:, 2, :] - a
    n = np.cross(e1, e2)
    nn = np.einsum("ij,ij->i", n, n)
    d11 = np.einsum("ij,ij->i", e1, e1)
    d12 = np.einsum("ij,ij->i", e1, e2)
    d22 = np.einsum("ij,ij->i", e2, e2)
    den = d11 * d22 - d12 * d12
    for lo in range(0, points.shape[0], _CHUNK):
        p = points[lo : lo + _CHUNK]  # (P,3)
        best = np.full((p.shape[0], tris.shape[0]), np.inf)
        for s, e in edges:
            d = e - s  # (T,3)
            w = p[:, None, :] - s[None, :, :]  # (P,T,3)
            dd = np.einsum("ij,ij->i", d, d)
            u = np.einsum("ptj,tj->pt", w, d) / np.where(dd > 0, dd, 1.0)
            u = np.clip(u, 0.0, 1.0)
            q = w - u[:, :, None] * d[None, :, :]
            best = np.minimum(best, np.einsum("ptj,ptj->pt", q, q))
        # interior projection where the triangle is non-degenerate
        w = p[:, None, :] - a[None, :, :]
        dist_n = np.einsum("ptj,tj->pt", w, n)
        with np.errstate(invalid="ignore", divide="ignore"):
            q = w - (dist_n / np.where(nn > 0, nn, 1.0))[:, :, None] * n[None, :, :]
            q1d = np.einsum("ptj,tj->pt", q, e1)
            q2d = np.einsum("ptj,tj->pt", q, e2)
            uu = (d22 * q1d - d12 * q2d) / np.where(den > 0, den, 1.0)
            vv = (d11 * q2d - d12 * q1d) / np.where(den > 0, den, 1.0)
            inside = (den > 0) & (uu >= 0) & (vv >= 0) & (uu + vv <= 1)
            plane = dist_n * dist_n / np.where(nn > 0, nn, 1.0)
        best = np.where(inside & (nn > 0), np.minimum(best, plane), best)
        out[lo : lo + _CHUNK] = np.sqrt(best.min(axis=1))
    return out


# ---------------------------------------------------------------------------
# ray-crossing parity (point-in-mesh test)
#
# Moller-Trumbore along a fixed direction; hits too close to an edge or to
# the ray origin are flagged suspect so the caller can retry with a jittered
# direction.

_EDGE_EPS = 1e-10


def _ray_crossings_loop(points, tris, direction, crossings, suspect):
    d0, d1, d2 = direction[0], direction[1], direction[2]
    for i in range(points.shape[0]):
        count = 0
        bad = False
        for t in range(tris.shape[0]):
            e10 = tris[t, 1, 0] - tris[t, 0, 0]
            e11 = tris[t, 1, 1] - tris[t, 0, 1]
            e12 = tris[t, 1, 2] - tris[t, 0, 2]
            e20 = tris[t, 2, 0] - tris[t, 0, 0]
            e21 = tris[t, 2, 1] - tris[t, 0, 1]
            e22 = tris[t, 2, 2] - tris[t, 0, 2]
            h0 = d1 * e22 - d2 * e21
            h1 = d2 * e20 - d0 * e22
            h2 = d0 * e21 - d1 * e20
            det = e10 * h0 + e11 * h1 + e12 * h2
            if abs(det) < 1e-14:
                continue
            s0 = points[i, 0] - tris[t, 0, 0]
            s1 = points[i, 1] - tris[t, 0, 1]
            s2 = points[i, 2] - tris[t, 0, 2]
            u = (s0 * h0 + s1 * h1 + s2 * h2) / det
            if u < -_EDGE_EPS or u > 1.0 + _EDGE_EPS:
                continue
            q0 = s1 * e12 - s2 * e11
            q1 = s2 * e10 - s0 * e12
            q2 = s0 * e11 - s1 * e10
            v = (d0 * q0 + d1 * q1 + d2 * q2) / det
            if v < -_EDGE_EPS or u + v > 1.0 + _EDGE_EPS:
                continue
            tt = (e20 * q0 + e21 * q1 + e22 * q2) / det
            if tt <= 0.0:
                if abs(tt) < _EDGE_EPS:
                    bad = True
                continue
            if (
                u < _EDGE_EPS
                or v < _EDGE_EPS
                or u + v > 1.0 - _EDGE_EPS
                or tt < _EDGE_EPS
            ):
                bad = True
            count += 1
        crossings[i] = count
        suspect[i] = bad


def _ray_crossings_numpy(points, tris, direction):
    crossings = np.zeros(points.shape[0], dtype=np.int64)
    suspect = np.zeros(points.shape[0], dtype=np.bool_)
    a = tris[:, 0, :]
    e1 = tris[:, 1, :] - a
    e2 = tris[:, 2, :] - a
    h = np.cross(np.broadcast_to(direction, e2.shape), e2)
    det = np.einsum("ij,ij->i", e1, h)
    ok = np.abs(det) >= 1e-14
    inv = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
    for lo in range(0, points.shape[0], _CHUNK):
        p = points[lo : lo + _CHUNK]
        s = p[:, None, :] - a[None, :, :]  # (P,T,3)
        u = np.einsum("ptj,tj->pt", s, h) * inv
        q = np.cross(s, np.broadcast_to(e1, s.shape))
        v = np.einsum("ptj,j->pt", q, direction) * inv
        tt = np.einsum("ptj,tj->pt", q, e2) * inv
        hit = (
            ok[None, :]
            & (u >= -_EDGE_EPS)
            & (u <= 1.0 + _EDGE_EPS)
            & (v >= -_EDGE_EPS)
            & (u + v <= 1.0 + _EDGE_EPS)
            & (tt > 0.0)
        )
        near_edge = (
            (u < _EDGE_EPS)
            | (v < _EDGE_EPS)
            | (u + v > 1.0 - _EDGE_EPS)
            | (np.abs(tt) < _EDGE_EPS)
        )
        crossings[lo : lo + _CHUNK] = hit.sum(axis=1)
        suspect[lo : lo + _CHUNK] = (
            (hit & near_edge) | (ok[None, :] & (np.abs(tt) < _EDGE_EPS))
        ).any(axis=1)
    return crossings, suspect


if NUMBA_ENABLED:
    _point_tris_min_dist_jit = njit(cache=True)(_point_tris_min_dist_loop)

    @njit(cache=True)
    def _point_mesh_distance_jit(points, tris, out):
        for i in range(points.shape[0]):
            out[i] = _point_tris_min_dist_jit(points[i], tris)

    _ray_crossings_jit = njit(cache=True)(_ray_crossings_loop)


def point_mesh_distance(points, tris):
    """Unsigned distance from each point to the nearest triangle.

    points: (P, 3); tris: (T, 3, 3). Returns (P,).
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    tris = np.ascontiguousarray(tris, dtype=np.float64)
    if points.shape[0] == 0 or tris.shape[0] == 0:
        return np.full(points.shape[0], np.inf)
    if NUMBA_ENABLED:
        out = np.empty(points.shape[0])
        _point_mesh_distance_jit(points, tris, out)
        return out
    return _point_mesh_distance_numpy(points, tris)


def ray_crossings(points, tris, direction):
    """Count ray/triangle crossings from each point along ``direction``.

    Returns (crossings, suspect); suspect marks grazing hits that need a
    retry with a different direction before the parity can be trusted.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    tris = np.ascontiguousarray(tris, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    if points.shape[0] == 0 or tris.shape[0] == 0:
        return (
            np.zeros(points.shape[0], dtype=np.int64),
            np.zeros(points.shape[0], dtype=np.bool_),
        )
    if NUMBA_ENABLED:
        crossings = np.empty(points.shape[0], dtype=np.int64)
        suspect = np.empty(points.shape[0], dtype=np.bool_)
        _ray_crossings_jit(points, tris, direction, crossings, suspect)
        return crossings, suspect
    return _ray_crossings_numpy(points, tris, direction)

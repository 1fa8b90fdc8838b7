"""Independent reference implementations used as test oracles.

These deliberately do not share code with scene_nav internals: the
point-triangle distance is Eberly's region-based algorithm (the package
uses an edge/plane decomposition), the inside test casts a +x ray with
plain even-odd counting, graph costs come from Dijkstra, and gradients
from central finite differences.
"""

import heapq
import math

import numpy as np


def point_triangle_distance_eberly(p, tri):
    """Eberly's point/triangle distance, scalar reference version."""
    b = tri[0]
    e0 = tri[1] - tri[0]
    e1 = tri[2] - tri[0]
    a = float(np.dot(e0, e0))
    bb = float(np.dot(e0, e1))
    c = float(np.dot(e1, e1))
    d = float(np.dot(e0, b - p))
    e = float(np.dot(e1, b - p))
    s = bb * e - c * d
    t = bb * d - a * e
    det = a * c - bb * bb
    if s + t <= det:
        if s < 0:
            if t < 0:  # region 4
                if d < 0:
                    t = 0.0
                    s = 1.0 if -d >= a else -d / a
                else:
                    s = 0.0
                    if e >= 0:
                        t = 0.0
                    elif -e >= c:
                        t = 1.0
                    else:
                        t = -e / c
            else:  # region 3
                s = 0.0
                if e >= 0:
                    t = 0.0
                elif -e >= c:
                    t = 1.0
                else:
                    t = -e / c
        elif t < 0:  # region 5
            t = 0.0
            if d >= 0:
                s = 0.0
            elif -d >= a:
                s = 1.0
            else:
                s = -d / a
        else:  # region 0
            if det == 0:
                s = 0.0
                t = 0.0
            else:
                s /= det
                t /= det
    else:
        if s < 0:  # region 2
            tmp0 = bb + d
            tmp1 = c + e
            if tmp1 > tmp0:
                numer = tmp1 - tmp0
                denom = a - 2 * bb + c
                s = 1.0 if numer >= denom else numer / denom
                t = 1.0 - s
            else:
                s = 0.0
                if tmp1 <= 0:
                    t = 1.0
                elif e >= 0:
                    t = 0.0
                else:
                    t = -e / c
        elif t < 0:  # region 6
            tmp0 = bb + e
            tmp1 = a + d
            if tmp1 > tmp0:
                numer = tmp1 - tmp0
                denom = a - 2 * bb + c
                t = 1.0 if numer >= denom else numer / denom
                s = 1.0 - t
            else:
                t = 0.0
                if tmp1 <= 0:
                    s = 1.0
                elif d >= 0:
                    s = 0.0
                else:
                    s = -d / a
        else:  # region 1
            numer = c + e - bb - d
            if numer <= 0:
                s = 0.0
            else:
                denom = a - 2 * bb + c
                s = 1.0 if numer >= denom else numer / denom
            t = 1.0 - s
    closest = b + s * e0 + t * e1
    return float(np.linalg.norm(p - closest))


def brute_mesh_distance(p, tris):
    return min(point_triangle_distance_eberly(p, tri) for tri in tris)


def brute_inside(p, tris, direction=(1.0, 0.0123, 0.00457)):
    """Even-odd inside test by counting +direction ray crossings."""
    d = np.asarray(direction, dtype=np.float64)
    count = 0
    for tri in tris:
        e1 = tri[1] - tri[0]
        e2 = tri[2] - tri[0]
        h = np.cross(d, e2)
        det = float(np.dot(e1, h))
        if abs(det) < 1e-14:
            continue
        s = p - tri[0]
        u = float(np.dot(s, h)) / det
        if u < 0 or u > 1:
            continue
        q = np.cross(s, e1)
        v = float(np.dot(d, q)) / det
        if v < 0 or u + v > 1:
            continue
        t = float(np.dot(e2, q)) / det
        if t > 0:
            count += 1
    return count % 2 == 1


def dijkstra_cost(values, start, goal, lam=0.0, strict=False, impassable=None):
    """Reference cost of the cheapest 4-connected path.

    Step cost entering cell c is 1 + lam * values[c] (or bare values[c]
    when strict is True), mirroring the planner's contract.
    """
    nx, ny = values.shape
    dist = {start: 0.0}
    heap = [(0.0, start)]
    while heap:
        d, node = heapq.heappop(heap)
        if node == goal:
            return d
        if d > dist.get(node, math.inf):
            continue
        i, j = node
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            ni, nj = i + di, j + dj
            if not (0 <= ni < nx and 0 <= nj < ny):
                continue
            v = values[ni, nj]
            if impassable is not None and v >= impassable:
                continue
            nd = d + (v if strict else 1.0 + lam * v)
            if nd < dist.get((ni, nj), math.inf):
                dist[(ni, nj)] = nd
                heapq.heappush(heap, (nd, (ni, nj)))
    return None


def bresenham_reference(x0, y0, x1, y1):
    """Textbook integer Bresenham covering all octants."""
    cells = []
    steep = abs(y1 - y0) > abs(x1 - x0)
    if steep:
        x0, y0, x1, y1 = y0, x0, y1, x1
    swapped = False
    if x0 > x1:
        x0, x1 = x1, x0
        y0, y1 = y1, y0
        swapped = True
    dx = x1 - x0
    dy = abs(y1 - y0)
    err = dx // 2
    ystep = 1 if y0 < y1 else -1
    y = y0
    for x in range(x0, x1 + 1):
        cells.append((y, x) if steep else (x, y))
        err -= dy
        if err < 0:
            y += ystep
            err += dx
    if swapped:
        cells.reverse()
    return cells


def naive_box_filter(values, radius):
    """O(N * k^2) zero-padded normalized box filter."""
    nx, ny = values.shape
    out = np.zeros_like(values, dtype=np.float64)
    k = 2 * radius + 1
    for i in range(nx):
        for j in range(ny):
            acc = 0.0
            for di in range(-radius, radius + 1):
                for dj in range(-radius, radius + 1):
                    ii, jj = i + di, j + dj
                    if 0 <= ii < nx and 0 <= jj < ny:
                        acc += values[ii, jj]
            out[i, j] = acc / (k * k)
    return out


def finite_difference_gradient(func, x, h=1e-5):
    """Central finite differences of a scalar function of an array."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = grad.reshape(-1)
    for k in range(flat.size):
        xp = flat.copy()
        xm = flat.copy()
        xp[k] += h
        xm[k] -= h
        gflat[k] = (func(xp.reshape(x.shape)) - func(xm.reshape(x.shape))) / (2 * h)
    return grad


def relative_gradient_error(analytic, numeric):
    denom = max(np.linalg.norm(analytic.ravel()), np.linalg.norm(numeric.ravel()), 1e-12)
    return np.linalg.norm((analytic - numeric).ravel()) / denom

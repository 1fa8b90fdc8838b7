"""Synthetic scenes: deterministic point clouds and closed meshes used
by the test suite, the CLI examples, and the service's named fixtures."""

import numpy as np

from .geometry import PointCloud, TriMesh

_BOX_FACES = np.array(
    [
        [0, 2, 1], [0, 3, 2],  # bottom (z-)
        [4, 5, 6], [4, 6, 7],  # top (z+)
        [0, 1, 5], [0, 5, 4],  # y-
        [2, 3, 7], [2, 7, 6],  # y+
        [1, 2, 6], [1, 6, 5],  # x+
        [3, 0, 4], [3, 4, 7],  # x-
    ],
    dtype=np.int64,
)


def box_mesh(center, size):
    """Closed axis-aligned box mesh (12 triangles, outward normals)."""
    c = np.asarray(center, dtype=np.float64)
    h = np.asarray(size, dtype=np.float64) / 2.0
    corners = np.array(
        [
            [-1, -1, -1], [1, -1, -1], [1, 1, -1], [-1, 1, -1],
            [-1, -1, 1], [1, -1, 1], [1, 1, 1], [-1, 1, 1],
        ],
        dtype=np.float64,
    )
    return TriMesh(c + corners * h, _BOX_FACES)


def merge_meshes(meshes):
    verts = []
    faces = []
    offset = 0
    for m in meshes:
        verts.append(m.vertices)
        faces.append(m.faces + offset)
        offset += m.vertices.shape[0]
    return TriMesh(np.concatenate(verts), np.concatenate(faces))


def icosphere(subdivisions=2, radius=1.0):
    """Unit icosahedron subdivided ``subdivisions`` times, projected to
    the sphere."""
    t = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
            [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
            [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
        ],
        dtype=np.float64,
    )
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [tuple(v) for v in verts]
    for _ in range(subdivisions):
        cache = {}
        vlist = list(verts)

        def midpoint(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = np.array(vlist[a]) + np.array(vlist[b])
                m /= np.linalg.norm(m)
                cache[key] = len(vlist)
                vlist.append(tuple(m))
            return cache[key]

        new_faces = []
        for a, b, c in faces:
            ab = midpoint(a, b)
            bc = midpoint(b, c)
            ca = midpoint(c, a)
            new_faces.extend([(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)])
        verts, faces = vlist, new_faces
    v = np.array(verts, dtype=np.float64) * radius
    return TriMesh(v, np.array(faces, dtype=np.int64))


def box_surface_points(center, size, spacing=0.05):
    """Deterministic grid sampling of a box's six faces."""
    c = np.asarray(center, dtype=np.float64)
    h = np.asarray(size, dtype=np.float64) / 2.0
    pts = []
    axes = [(1, 2, 0), (0, 2, 1), (0, 1, 2)]
    for a, b, n in axes:
        na = max(2, int(round(size[a] / spacing)) + 1)
        nb = max(2, int(round(size[b] / spacing)) + 1)
        ga = np.linspace(-h[a], h[a], na)
        gb = np.linspace(-h[b], h[b], nb)
        gg = np.stack(np.meshgrid(ga, gb, indexing="ij"), axis=-1).reshape(-1, 2)
        for sign in (-1.0, 1.0):
            face = np.zeros((gg.shape[0], 3))
            face[:, a] = gg[:, 0]
            face[:, b] = gg[:, 1]
            face[:, n] = sign * h[n]
            pts.append(c + face)
    return np.concatenate(pts)


# corridor fixture: a heavy wall with one far-off gap. The direct route
# crosses the wall's blur fringe; weighting the Bresenham density term
# steers plans through the gap instead. Constants frozen by the
# regression tests.
CORRIDOR_WALL_X = 1.5
CORRIDOR_GAP_Y = (2.4, 3.0)
CORRIDOR_SIZE = (3.0, 3.0)
CORRIDOR_START = (0.25, 1.05, 0.95)
CORRIDOR_GOAL = (2.75, 1.05, 0.95)


def corridor_cloud():
    """3 x 3 m scene with a dense wall at x=1.5 and a gap near y=2.7."""
    pts = []
    ys = np.arange(0.025, CORRIDOR_SIZE[1], 0.05)
    zs = np.arange(0.3, 1.9, 0.2)
    for y in ys:
        if CORRIDOR_GAP_Y[0] <= y < CORRIDOR_GAP_Y[1]:
            continue
        for z in zs:
            for dx in (-0.02, 0.0, 0.02):
                pts.append((CORRIDOR_WALL_X + dx, y, z))
    # floor points: excluded from the map by the z band but define extents
    for x in np.arange(0.05, CORRIDOR_SIZE[0], 0.25):
        for y in np.arange(0.05, CORRIDOR_SIZE[1], 0.25):
            pts.append((x, y, 0.05))
    return PointCloud(np.array(pts))


# room fixture: 6 x 6 m floor with two closed box obstacles; door and
# table keypoints for the end-to-end walk.
ROOM_SIZE = (6.0, 6.0)
ROOM_BOXES = (
    ((2.0, 2.5, 0.6), (1.0, 1.0, 1.2)),  # (center xyz), (size xyz)
    ((4.0, 4.5, 0.6), (1.0, 1.0, 1.2)),
)
ROOM_DOOR = (0.5, 0.5, 0.95)
ROOM_TABLE = (5.5, 5.5, 0.95)


def room_obstacle_mesh():
    return merge_meshes([box_mesh(c, s) for c, s in ROOM_BOXES])


def room_cloud():
    pts = [box_surface_points(c, s, spacing=0.05) for c, s in ROOM_BOXES]
    floor = []
    for x in np.arange(0.05, ROOM_SIZE[0], 0.25):
        for y in np.arange(0.05, ROOM_SIZE[1], 0.25):
            floor.append((x, y, 0.05))
    pts.append(np.array(floor))
    return PointCloud(np.concatenate(pts))


FIXTURES = {
    "corridor": corridor_cloud,
    "room": room_cloud,
}


def write_fixture_xyz(name, path):
    cloud = FIXTURES[name]()
    with open(path, "w") as fh:
        for p in cloud.points:
            # %.17g keeps the round trip bit-exact so binning cannot
            # drift across cell boundaries
            fh.write("%.17g %.17g %.17g\n" % (p[0], p[1], p[2]))

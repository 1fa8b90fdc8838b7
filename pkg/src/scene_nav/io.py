"""Readers for OBJ / PLY / XYZ geometry files.

All geometry is interpreted in meters, z-up. A scale factor and an
up-axis remap can be applied at load time for files in other
conventions.
"""

import struct
from pathlib import Path

import numpy as np

from .errors import EmptyGeometryError, GeometryParseError
from .geometry import PointCloud, TriMesh

FORMATS = ("obj", "ply", "xyz")


def _apply_convention(points, scale, up):
    points = points * float(scale)
    if up == "z":
        return points
    if up == "y":  # y-up -> z-up
        return points[:, [0, 2, 1]] * np.array([1.0, -1.0, 1.0])
    raise ValueError(f"unsupported up axis {up!r}")


def load_geometry(path, fmt=None, scale=1.0, up="z"):
    """Load a TriMesh or PointCloud from ``path``.

    fmt defaults to the file extension. OBJ/PLY files without faces
    degrade to a PointCloud; XYZ is always a PointCloud.
    """
    path = Path(path)
    if fmt is None:
        fmt = path.suffix.lstrip(".").lower()
    if fmt not in FORMATS:
        raise GeometryParseError(f"unknown format {fmt!r}", path=path)
    if fmt == "obj":
        verts, faces = _load_obj(path)
    elif fmt == "ply":
        verts, faces = _load_ply(path)
    else:
        verts, faces = _load_xyz(path), None

    if verts.shape[0] == 0:
        raise EmptyGeometryError(f"no geometry in {path}")
    verts = _apply_convention(verts, scale, up)
    if faces is None or faces.shape[0] == 0:
        return PointCloud(verts)
    return TriMesh(verts, faces)


def _load_obj(path):
    verts = []
    faces = []
    with open(path, "r", errors="replace") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "v":
                if len(parts) < 4:
                    raise GeometryParseError(
                        "vertex line needs 3 coordinates", path=path, line=lineno
                    )
                try:
                    verts.append([float(parts[1]), float(parts[2]), float(parts[3])])
                except ValueError:
                    raise GeometryParseError(
                        "bad vertex coordinate", path=path, line=lineno
                    ) from None
            elif parts[0] == "f":
                try:
                    idx = [int(tok.split("/")[0]) for tok in parts[1:]]
                except ValueError:
                    raise GeometryParseError(
                        "bad face index", path=path, line=lineno
                    ) from None
                if len(idx) < 3:
                    raise GeometryParseError(
                        "face needs at least 3 vertices", path=path, line=lineno
                    )
                idx = [i - 1 if i > 0 else len(verts) + i for i in idx]
                for k in range(1, len(idx) - 1):  # fan triangulation
                    faces.append([idx[0], idx[k], idx[k + 1]])
    return np.array(verts, dtype=np.float64).reshape(-1, 3), np.array(
        faces, dtype=np.int64
    ).reshape(-1, 3)


def _load_xyz(path):
    pts = []
    with open(path, "r", errors="replace") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if len(parts) < 3:
                raise GeometryParseError(
                    "xyz line needs 3 coordinates", path=path, line=lineno
                )
            try:
                pts.append([float(parts[0]), float(parts[1]), float(parts[2])])
            except ValueError:
                raise GeometryParseError(
                    "bad coordinate", path=path, line=lineno
                ) from None
    return np.array(pts, dtype=np.float64).reshape(-1, 3)


_PLY_TYPES = {
    "char": ("b", 1),
    "int8": ("b", 1),
    "uchar": ("B", 1),
    "uint8": ("B", 1),
    "short": ("h", 2),
    "int16": ("h", 2),
    "ushort": ("H", 2),
    "uint16": ("H", 2),
    "int": ("i", 4),
    "int32": ("i", 4),
    "uint": ("I", 4),
    "uint32": ("I", 4),
    "float": ("f", 4),
    "float32": ("f", 4),
    "double": ("d", 8),
    "float64": ("d", 8),
}


def _load_ply(path):
    raw = Path(path).read_bytes()
    end = raw.find(b"end_header")
    if not raw.startswith(b"ply") or end < 0:
        raise GeometryParseError("not a PLY file", path=path, offset=0)
    header_end = raw.index(b"\n", end) + 1
    header = raw[:header_end].decode("ascii", errors="replace").splitlines()

    fmt = None
    elements = []  # (name, count, [(prop_name, type, list_count_type|None)])
    for line in header:
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "format":
            fmt = parts[1]
        elif parts[0] == "element":
            elements.append((parts[1], int(parts[2]), []))
        elif parts[0] == "property":
            if not elements:
                raise GeometryParseError("property before element", path=path)
            if parts[1] == "list":
                elements[-1][2].append((parts[4], parts[3], parts[2]))
            else:
                elements[-1][2].append((parts[2], parts[1], None))
    if fmt not in ("ascii", "binary_little_endian"):
        raise GeometryParseError(f"unsupported PLY format {fmt}", path=path)

    if fmt == "ascii":
        return _parse_ply_ascii(path, raw[header_end:], elements, header_end)
    return _parse_ply_binary(path, raw[header_end:], elements, header_end)


def _parse_ply_ascii(path, body, elements, base):
    tokens = body.decode("ascii", errors="replace").split()
    pos = 0
    verts, faces = [], []

    def take(n):
        nonlocal pos
        if pos + n > len(tokens):
            raise GeometryParseError(
                "truncated PLY body", path=path, offset=base + len(body)
            )
        out = tokens[pos : pos + n]
        pos += n
        return out

    for name, count, props in elements:
        for _ in range(count):
            row = {}
            for pname, _ptype, list_type in props:
                if list_type is None:
                    row[pname] = float(take(1)[0])
                else:
                    n = int(take(1)[0])
                    row[pname] = [float(t) for t in take(n)]
            if name == "vertex":
                verts.append([row.get("x", 0.0), row.get("y", 0.0), row.get("z", 0.0)])
            elif name == "face":
                idx = [int(i) for i in next(iter(row.values()))]
                for k in range(1, len(idx) - 1):
                    faces.append([idx[0], idx[k], idx[k + 1]])
    return (
        np.array(verts, dtype=np.float64).reshape(-1, 3),
        np.array(faces, dtype=np.int64).reshape(-1, 3),
    )


def _parse_ply_binary(path, body, elements, base):
    pos = 0
    verts, faces = [], []

    def take(code, size):
        nonlocal pos
        if pos + size > len(body):
            raise GeometryParseError("truncated PLY body", path=path, offset=base + pos)
        (val,) = struct.unpack_from("<" + code, body, pos)
        pos += size
        return val

    for name, count, props in elements:
        for _ in range(count):
            row = {}
            for pname, ptype, list_type in props:
                if list_type is None:
                    code, size = _PLY_TYPES[ptype]
                    row[pname] = take(code, size)
                else:
                    ccode, csize = _PLY_TYPES[list_type]
                    n = int(take(ccode, csize))
                    code, size = _PLY_TYPES[ptype]
                    row[pname] = [take(code, size) for _ in range(n)]
            if name == "vertex":
                verts.append([row.get("x", 0.0), row.get("y", 0.0), row.get("z", 0.0)])
            elif name == "face":
                idx = [int(i) for i in next(iter(row.values()))]
                for k in range(1, len(idx) - 1):
                    faces.append([idx[0], idx[k], idx[k + 1]])
    return (
        np.array(verts, dtype=np.float64).reshape(-1, 3),
        np.array(faces, dtype=np.int64).reshape(-1, 3),
    )


def scene_to_cloud(geometry):
    """Collapse loaded geometry to the point set used for map building."""
    if isinstance(geometry, PointCloud):
        return geometry
    return PointCloud(geometry.vertices)

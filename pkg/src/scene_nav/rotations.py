"""6D rotation representation and kinematic-chain composition.

A rotation is encoded as the first two columns of its matrix
(column-major, six scalars); decoding runs Gram-Schmidt on the two
columns and completes the frame with a cross product.
"""

import numpy as np

_MIN_NORM = 1e-8


def rot_to_6d(matrix):
    """First two columns of a rotation matrix, column-major."""
    m = np.asarray(matrix, dtype=np.float64)
    return m[..., :3, :2].swapaxes(-1, -2).reshape(*m.shape[:-2], 6)


def sixd_to_rot(sixd):
    """Decode six scalars to an orthonormal rotation matrix."""
    v = np.asarray(sixd, dtype=np.float64).reshape(*np.shape(sixd)[:-1], 2, 3)
    a = v[..., 0, :]
    b = v[..., 1, :]
    na = np.linalg.norm(a, axis=-1)
    if np.any(na < _MIN_NORM):
        raise ValueError("first 6D column has near-zero norm")
    x = a / na[..., None]
    b = b - np.sum(b * x, axis=-1, keepdims=True) * x
    nb = np.linalg.norm(b, axis=-1)
    if np.any(nb < _MIN_NORM):
        raise ValueError("6D columns are colinear")
    y = b / nb[..., None]
    z = np.cross(x, y)
    return np.stack([x, y, z], axis=-1)


def relative_to_global(parents, local_rotations):
    """Compose parent-relative rotations into global ones.

    parents: per-joint parent index, -1 for roots; each parent index
    must be smaller than the child's (forest in topological order).
    """
    parents = list(parents)
    locals_ = np.asarray(local_rotations, dtype=np.float64)
    if locals_.shape[1:] != (3, 3) or locals_.shape[0] != len(parents):
        raise ValueError("expected one 3x3 local rotation per joint")
    for i, p in enumerate(parents):
        if p is None:
            parents[i] = -1
        elif not (-1 <= p < i):
            raise ValueError(f"joint {i} has invalid parent {p} (cycle or disorder)")
    out = np.empty_like(locals_)
    for i, p in enumerate(parents):
        out[i] = locals_[i] if p < 0 else out[p] @ locals_[i]
    return out


def random_rotation(rng):
    """Uniform random rotation (for tests and fixtures)."""
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ]
    )

"""Compare the numba and numpy kernel backends.

Runs point-to-mesh distance and ray-crossing queries on icospheres of
increasing resolution and prints a wall-time table. Run it twice if you
care about steady-state numba timings; the first call pays the JIT
compile cost (reported separately below).

Usage: python3 benchmarks/bench_kernels.py [--points N] [--repeat K]
"""

import argparse
import time

import numpy as np

from scene_nav import _kernels
from scene_nav.fixtures import icosphere


def timeit(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if not _kernels.NUMBA_ENABLED:
        raise SystemExit(
            "numba backend is disabled (SCENE_NAV_NUMBA=0); nothing to compare"
        )

    rng = np.random.default_rng(0)
    pts = rng.uniform(-1.5, 1.5, size=(args.points, 3))
    direction = np.array([0.577, 0.211, 0.789])

    # pay the JIT compile cost up front and report it
    tiny = icosphere(0).triangles
    t0 = time.perf_counter()
    _kernels.point_mesh_distance(pts[:1], tiny)
    _kernels.ray_crossings(pts[:1], tiny, direction)
    compile_s = time.perf_counter() - t0
    print(f"one-time numba compile: {compile_s:.2f} s")
    print()
    header = (
        f"{'kernel':<20} {'tris':>6} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8}"
    )
    print(header)
    print("-" * len(header))

    for sub in (2, 3, 4):
        tris = icosphere(sub).triangles
        pairs = [
            (
                "point_mesh_distance",
                lambda: _kernels.point_mesh_distance(pts, tris),
                lambda: _kernels._point_mesh_distance_numpy(pts, tris),
            ),
            (
                "ray_crossings",
                lambda: _kernels.ray_crossings(pts, tris, direction),
                lambda: _kernels._ray_crossings_numpy(pts, tris, direction),
            ),
        ]
        for name, fast, plain in pairs:
            t_numba = timeit(fast, args.repeat)
            t_numpy = timeit(plain, args.repeat)
            print(
                f"{name:<20} {tris.shape[0]:>6} {t_numba * 1e3:>10.2f} "
                f"{t_numpy * 1e3:>10.2f} {t_numpy / t_numba:>7.1f}x"
            )


if __name__ == "__main__":
    main()

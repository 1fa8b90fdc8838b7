"""Acceptance gate: one test per headline criterion, each printing a
single PASS line on success (run with -s or check captured stdout).
These deliberately re-derive expectations with the independent oracles
in oracles.py rather than reusing package internals."""

import json
import time

import numpy as np
import pytest

from oracles import (
    dijkstra_cost,
    finite_difference_gradient,
    relative_gradient_error,
)
from scene_nav.cli import main as cli_main
from scene_nav.fixtures import (
    CORRIDOR_GOAL,
    CORRIDOR_START,
    ROOM_DOOR,
    ROOM_TABLE,
    corridor_cloud,
    icosphere,
    room_cloud,
    room_obstacle_mesh,
)
from scene_nav.geometry import PointCloud, crop_volume_for_object
from scene_nav.guidance import (
    GuidanceParams,
    SkeletonPose,
    TrajectoryState,
    guided_update,
    hand_loss,
    root_loss,
    scene_distance_loss,
    scene_repulsion_loss,
)
from scene_nav.metrics import MotionSequence, ObjectTask, evaluate, locomotion_metrics
from scene_nav.obstacle_map import GridCoord, ObstacleMap, build_map, smooth_map
from scene_nav.planner import (
    PlannerConfig,
    astar_segment,
    bresenham,
    heuristic,
    path_density_sum,
    plan_path,
    schedule_frames,
)
from scene_nav.sdf import SdfScene, penetration_score


def ok(name):
    print(f"PASS {name}")


def random_map(rng, nx=30, ny=30):
    vals = np.zeros((nx, ny))
    hot = rng.random((nx, ny)) < 0.25
    vals[hot] = rng.uniform(0.5, 8.0, size=hot.sum())
    vals[0, 0] = vals[nx - 1, ny - 1] = 0.0
    return ObstacleMap(origin=[0, 0], cell_size=0.1, values=vals)


def test_planner_optimality():
    """lam=0 gives unit step costs; A* goal cost equals Dijkstra on 50
    random 30x30 maps, exactly, in under a second."""
    rng = np.random.default_rng(42)
    t0 = time.perf_counter()
    for _ in range(50):
        m = random_map(rng)
        path = astar_segment(m, GridCoord(0, 0), GridCoord(29, 29))
        cost = float(len(path) - 1)
        assert cost == dijkstra_cost(m.values, (0, 0), (29, 29))
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0, f"took {elapsed:.2f}s"
    ok("planner-optimality: 50/50 A* costs equal Dijkstra, "
       f"{elapsed * 1000:.0f} ms total")


def test_heuristic_fidelity():
    """Guidance cost equals Euclidean distance plus lam * independently
    summed values of the rasterized line cells, on 1000 random pairs."""
    rng = np.random.default_rng(7)
    m = random_map(rng)
    cfg = PlannerConfig(lam=1.7)
    for _ in range(1000):
        a = GridCoord(*(int(v) for v in rng.integers(0, 30, size=2)))
        b = GridCoord(*(int(v) for v in rng.integers(0, 30, size=2)))
        cells = [c.as_tuple() for c in bresenham(a, b)]
        want = float(np.hypot(a.i - b.i, a.j - b.j)) + 1.7 * float(
            sum(m.values[i, j] for i, j in cells)
        )
        assert heuristic(m, a, b, cfg) == pytest.approx(want, abs=1e-12)
    ok("heuristic-fidelity: 1000/1000 pairs match enumerate-and-sum")


def test_obstacle_avoidance_effect():
    """Raising lam from 0 to 2 strictly lowers the summed map value
    along the corridor path. Recorded goldens: 48 -> 16."""
    m = smooth_map(build_map(corridor_cloud()), 1)
    sums = {}
    for lam in (0.0, 2.0):
        plan = plan_path(m, [CORRIDOR_START, CORRIDOR_GOAL], PlannerConfig(lam=lam))
        sums[lam] = path_density_sum(m, plan.dense_path)
    assert sums[0.0] == 48.0 and sums[2.0] == 16.0
    assert sums[2.0] < sums[0.0]
    ok(f"obstacle-avoidance: density sum {sums[0.0]:g} (lam=0) -> "
       f"{sums[2.0]:g} (lam=2)")


def test_map_correctness():
    """Grid counts equal brute-force binning of 10k random points with
    the strict 0.2 < z < 2 band."""
    rng = np.random.default_rng(11)
    pts = np.column_stack(
        [
            rng.uniform(0, 5, size=10_000),
            rng.uniform(0, 4, size=10_000),
            rng.uniform(0, 2.5, size=10_000),
        ]
    )
    m = build_map(PointCloud(pts))
    want = np.zeros(m.shape)
    for x, y, z in pts:
        if not 0.2 < z < 2.0:
            continue
        i = int(np.floor((x - m.origin[0]) / m.cell_size))
        j = int(np.floor((y - m.origin[1]) / m.cell_size))
        want[i, j] += 1
    assert np.array_equal(m.values, want)
    ok("map-correctness: 10k-point binning exact incl. z-band exclusion")


def test_gradient_suite():
    """All four losses match central finite differences (h=1e-5) with
    relative error < 1e-6 on 100 random instances each; tau=0 update is
    a bitwise identity."""
    rng = np.random.default_rng(3)
    h = 1e-5

    for _ in range(100):
        joints = rng.normal(size=(22, 3))
        cloud = PointCloud(rng.normal(size=(15, 3)))
        _, g = scene_distance_loss(SkeletonPose(joints=joints), cloud)
        num = finite_difference_gradient(
            lambda x: scene_distance_loss(SkeletonPose(joints=x), cloud)[0], joints, h
        )
        assert relative_gradient_error(g, num) < 1e-6

    for _ in range(100):
        traj = TrajectoryState(
            joints=rng.normal(size=(3, 22, 3)),
            wrist=rng.normal(size=(3, 3)),
            hand=rng.normal(size=(3, 16, 6)),
        )
        anchors = rng.normal(size=(2, 3))
        _, g = root_loss(traj, anchors, [0, 2])
        num = finite_difference_gradient(
            lambda x: root_loss(
                TrajectoryState(joints=x, wrist=traj.wrist, hand=traj.hand),
                anchors,
                [0, 2],
            )[0],
            traj.joints,
            h,
        )
        assert relative_gradient_error(g, num) < 1e-6

    for _ in range(100):
        traj = TrajectoryState(
            joints=rng.normal(size=(2, 22, 3)),
            wrist=rng.normal(size=(2, 3)),
            hand=rng.normal(size=(2, 16, 6)),
        )
        a_w = rng.normal(size=(1, 3))
        a_h = rng.normal(size=(1, 16, 6))
        _, gw, gh = hand_loss(traj, a_w, a_h, [1])
        num_w = finite_difference_gradient(
            lambda x: hand_loss(
                TrajectoryState(joints=traj.joints, wrist=x, hand=traj.hand),
                a_w, a_h, [1],
            )[0],
            traj.wrist,
            h,
        )
        num_h = finite_difference_gradient(
            lambda x: hand_loss(
                TrajectoryState(joints=traj.joints, wrist=traj.wrist, hand=x),
                a_w, a_h, [1],
            )[0],
            traj.hand,
            h,
        )
        assert relative_gradient_error(gw, num_w) < 1e-6
        assert relative_gradient_error(gh, num_h) < 1e-6

    checked = 0
    while checked < 100:
        traj = TrajectoryState(
            joints=rng.normal(scale=0.5, size=(2, 22, 3)),
            wrist=np.zeros((2, 3)),
            hand=np.zeros((2, 16, 6)),
        )
        pts = rng.normal(scale=0.5, size=(30, 3))
        flat = traj.joints.reshape(-1, 3)
        d = np.linalg.norm(flat[:, None, :] - pts[None, :, :], axis=2)
        keep = np.all(np.abs(d - 0.3) > 1e-3, axis=0)
        if keep.sum() < 5:
            continue
        cloud = PointCloud(pts[keep])
        _, g = scene_repulsion_loss(traj, cloud, 0.3)
        num = finite_difference_gradient(
            lambda x: scene_repulsion_loss(
                TrajectoryState(joints=x, wrist=traj.wrist, hand=traj.hand),
                cloud, 0.3,
            )[0],
            traj.joints,
            h,
        )
        assert relative_gradient_error(g, num) < 1e-6
        checked += 1

    traj = TrajectoryState(
        joints=rng.normal(size=(3, 22, 3)),
        wrist=rng.normal(size=(3, 3)),
        hand=rng.normal(size=(3, 16, 6)),
    )
    new, _ = guided_update(
        traj, GuidanceParams(tau=0.0), root_anchors=[[0, 0, 0]], root_schedule=[0]
    )
    assert new.joints.tobytes() == traj.joints.tobytes()
    assert new.wrist.tobytes() == traj.wrist.tobytes()
    assert new.hand.tobytes() == traj.hand.tobytes()
    ok("gradient-suite: 4 losses x 100 instances < 1e-6 rel error; "
       "tau=0 update bitwise identity")


def test_sdf_metric_suite():
    """Sphere penetration depth within 2x chord error; mean <= max on
    random sequences; success boundary exact at 0.05 m."""
    mesh = icosphere(5)
    scene = SdfScene(mesh)
    # chord error: max radial sag of the faceted unit sphere
    sag = 1.0 - float(
        np.min(np.linalg.norm(mesh.triangles.mean(axis=1), axis=1))
    )
    depth = penetration_score(scene, np.array([[0.0, 0.0, 0.6]]))
    assert abs(depth - 0.4) < 2 * sag

    rng = np.random.default_rng(5)
    box_scene = SdfScene(room_obstacle_mesh())
    for _ in range(20):
        human = rng.uniform(0, 6, size=(4, 8, 3))
        seq = MotionSequence(human=human, object_poses=np.stack([np.eye(4)] * 4))
        scores = [penetration_score(box_scene, human[f]) for f in range(4)]
        assert np.mean(scores) <= np.max(scores) + 1e-12

    task = ObjectTask(start_pose=np.eye(4), target_pose=np.eye(4))

    def seq_at(dist):
        pose = np.eye(4)
        pose[:3, 3] = [dist, 0, 0]
        return MotionSequence(human=np.zeros((1, 1, 3)), object_poses=pose[None])

    assert locomotion_metrics(seq_at(0.05), task)[2]
    assert not locomotion_metrics(seq_at(np.nextafter(0.05, 1)), task)[2]
    assert locomotion_metrics(seq_at(np.nextafter(0.05, 0)), task)[2]
    ok(f"sdf-metrics: sphere depth err {abs(depth - 0.4):.2e} < "
       f"{2 * sag:.2e}; mean<=max; 0.05 m boundary exact")


def test_anchor_schedule():
    """Waypoint k lands on frame 38k."""
    frames = schedule_frames(1000)
    assert frames == [38 * k for k in range(1000)]
    ok("anchor-schedule: waypoint k at frame 38k for k < 1000")


def test_crop_volume():
    """Crop box is [x +- 0.8] x [y +- 0.8] x [0.2, 1.8] for 100 random
    translations."""
    rng = np.random.default_rng(9)
    for _ in range(100):
        t = rng.uniform(-10, 10, size=3)
        v = crop_volume_for_object(t)
        assert np.allclose(v.vmin, [t[0] - 0.8, t[1] - 0.8, 0.2], atol=1e-12)
        assert np.allclose(v.vmax, [t[0] + 0.8, t[1] + 0.8, 1.8], atol=1e-12)
    ok("crop-volume: bounds exact on 100 random translations")


def test_cli_determinism(tmp_path):
    """All four commands are byte-identical across reruns."""
    from scene_nav.guidance import TrajectoryState, trajectory_to_json_bytes
    from scene_nav.metrics import sequence_to_json_bytes

    def run(cmd, **cfg):
        p = tmp_path / f"{cmd}.json"
        p.write_text(json.dumps(cfg))
        assert cli_main([cmd, "--config", str(p)]) == 0

    traj = tmp_path / "traj.json"
    traj.write_bytes(trajectory_to_json_bytes(TrajectoryState.zeros(4)))
    seq_p = tmp_path / "seq.json"
    human = np.full((2, 3, 3), 1.5)
    seq_p.write_bytes(
        sequence_to_json_bytes(
            MotionSequence(human=human, object_poses=np.stack([np.eye(4)] * 2))
        )
    )

    outputs = {
        "map": ["map.csv", "map.png", "metadata.json"],
        "plan": ["plan.json"],
        "guide": ["guided_trajectory.json", "loss_log.csv"],
        "eval": ["report.txt"],
    }
    snapshots = {}
    for attempt in range(2):
        out = tmp_path / f"run{attempt}"
        run("map", scene="fixture:corridor", output_dir=str(out / "map"))
        run(
            "plan",
            scene="fixture:corridor",
            keypoints=[list(CORRIDOR_START), list(CORRIDOR_GOAL)],
            lam=2.0,
            output_dir=str(out / "plan"),
        )
        run(
            "guide",
            trajectory=str(traj),
            root_anchors=[[1.0, 0.0, 0.0]],
            root_schedule=[2],
            guidance={"steps": 5},
            output_dir=str(out / "guide"),
        )
        run(
            "eval",
            scene_mesh="fixture:room_obstacles",
            task={"start": [0, 0, 0], "target": [0, 0, 0]},
            sequence=str(seq_p),
            output_dir=str(out / "eval"),
        )
        snapshots[attempt] = {
            f"{cmd}/{name}": (out / cmd / name).read_bytes()
            for cmd, names in outputs.items()
            for name in names
        }
    assert snapshots[0] == snapshots[1]
    ok("cli-determinism: map/plan/guide/eval byte-identical across reruns")


def test_end_to_end_room():
    """Door-to-table plan in the 6x6 room, 200 root-only guidance steps
    converge to every scheduled anchor within 1e-3 m, and the synthetic
    walk evaluates collision-free. Total under 10 s."""
    t0 = time.perf_counter()
    m = smooth_map(build_map(room_cloud()), 1)
    plan = plan_path(m, [ROOM_DOOR, ROOM_TABLE], PlannerConfig(lam=2.0))
    n_way = plan.sparse_path.shape[0]
    assert n_way >= 2

    n_frames = plan.frame_schedule[-1] + 1
    traj = TrajectoryState.zeros(n_frames)
    params = GuidanceParams(tau=0.1, lambda1=1.0)
    schedule = plan.frame_schedule
    for _ in range(200):
        traj, _ = guided_update(
            traj, params, root_anchors=plan.sparse_path, root_schedule=schedule
        )
    for anchor, frame in zip(plan.sparse_path, schedule):
        err = np.linalg.norm(traj.joints[frame, 0] - anchor)
        assert err < 1e-3, f"frame {frame}: {err}"

    # synthetic walk: one body point riding each waypoint
    human = plan.sparse_path[:, None, :]
    poses = np.stack([np.eye(4)] * n_way)
    poses[:, :3, 3] = plan.sparse_path
    target = np.eye(4)
    target[:3, 3] = plan.sparse_path[-1]
    seq = MotionSequence(human=human, object_poses=poses)
    report = evaluate(seq, SdfScene(room_obstacle_mesh()), ObjectTask(np.eye(4), target))
    assert report.pene_rate == 0.0
    assert report.success
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0, f"took {elapsed:.1f}s"
    ok(f"end-to-end-room: {n_way} waypoints, anchors hit within 1e-3, "
       f"pene_rate 0, {elapsed:.1f}s")

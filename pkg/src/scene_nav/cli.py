"""Batch command-line entry point.

    scene-nav map|plan|guide|eval --config <path> [--set key=value ...]

Configuration is a JSON file; --set overrides individual (dotted) keys.
The effective configuration is echoed into the output directory so
every run is reproducible. Exit codes: 0 success, 2 input error,
3 invalid keypoint, 4 no path, 5 numeric failure.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import fixtures, io as gio
from .errors import (
    GuidanceError,
    InvalidNodeError,
    NoPathError,
    SceneNavError,
    SchemaError,
)
from .geometry import PointCloud
from .guidance import (
    GuidanceParams,
    guided_update,
    trajectory_from_json_bytes,
    trajectory_to_json_bytes,
)
from .metrics import MetricReport, ObjectTask, evaluate, sequence_from_json_bytes
from .obstacle_map import build_map, export_heatmap, smooth_map
from .planner import PathPlan, PlannerConfig, plan_path
from .sdf import SdfScene

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INVALID_NODE = 3
EXIT_NO_PATH = 4
EXIT_NUMERIC = 5

MESH_FIXTURES = {
    "room_obstacles": fixtures.room_obstacle_mesh,
}


def _load_config(args):
    cfg = {}
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
    for item in args.set or []:
        key, _, raw = item.partition("=")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = cfg
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
        node[parts[-1]] = value
    return cfg


def _outdir(cfg):
    out = Path(cfg.get("output_dir", "out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _echo_config(cfg, out):
    (out / "effective_config.json").write_bytes(
        (json.dumps(cfg, indent=2, sort_keys=True) + "\n").encode("ascii")
    )


def _load_scene_cloud(spec):
    if spec.startswith("fixture:"):
        name = spec.split(":", 1)[1]
        if name not in fixtures.FIXTURES:
            raise SchemaError(f"unknown scene fixture {name!r}")
        return fixtures.FIXTURES[name]()
    return gio.scene_to_cloud(gio.load_geometry(spec))


def _load_scene_mesh(spec):
    if spec.startswith("fixture:"):
        name = spec.split(":", 1)[1]
        if name not in MESH_FIXTURES:
            raise SchemaError(f"unknown mesh fixture {name!r}")
        return MESH_FIXTURES[name]()
    mesh = gio.load_geometry(spec)
    if isinstance(mesh, PointCloud):
        raise SchemaError(f"{spec} contains no faces; a mesh is required")
    return mesh


def _build_maps(cfg):
    cloud = _load_scene_cloud(cfg["scene"])
    raw = build_map(
        cloud,
        cell_size=cfg.get("cell_size", 0.1),
        z_band=tuple(cfg.get("z_band", (0.2, 2.0))),
    )
    smoothed = smooth_map(raw, cfg.get("kernel_radius", 1))
    return raw, smoothed


def cmd_map(cfg):
    out = _outdir(cfg)
    _echo_config(cfg, out)
    raw, smoothed = _build_maps(cfg)
    export_heatmap(smoothed, out / "map.csv", out / "map.png")
    meta = {
        "cells": list(smoothed.shape),
        "cell_size": smoothed.cell_size,
        "origin": smoothed.origin.tolist(),
        "z_band": list(smoothed.z_band),
        "kernel_radius": cfg.get("kernel_radius", 1),
        "raw_point_total": float(raw.values.sum()),
        "empty_input": raw.empty_input,
    }
    (out / "metadata.json").write_bytes(
        (json.dumps(meta, indent=2, sort_keys=True) + "\n").encode("ascii")
    )
    return EXIT_OK


def _load_keypoints(cfg):
    if "keypoints" in cfg and isinstance(cfg["keypoints"], list):
        return np.asarray(cfg["keypoints"], dtype=np.float64)
    with open(cfg["keypoints"]) as fh:
        return np.asarray(json.load(fh), dtype=np.float64)


def cmd_plan(cfg):
    out = _outdir(cfg)
    _echo_config(cfg, out)
    _, smoothed = _build_maps(cfg)
    keypoints = _load_keypoints(cfg)
    pcfg = PlannerConfig(
        lam=cfg.get("lam", 0.0),
        strict_density=cfg.get("strict_density", False),
        impassable=cfg.get("impassable"),
    )
    plan = plan_path(
        smoothed,
        keypoints,
        pcfg,
        stride=cfg.get("stride", 4),
        base_height=cfg.get("base_height", 0.95),
        frame_interval=cfg.get("frame_interval", 38),
        simplify_tolerance=cfg.get("simplify_tolerance"),
    )
    (out / "plan.json").write_bytes(plan.to_json_bytes())
    return EXIT_OK


def cmd_guide(cfg):
    out = _outdir(cfg)
    _echo_config(cfg, out)
    traj = trajectory_from_json_bytes(Path(cfg["trajectory"]).read_bytes())

    root_anchors = root_schedule = None
    if "plan" in cfg:
        plan = PathPlan.from_json_bytes(Path(cfg["plan"]).read_bytes())
        root_anchors = plan.sparse_path
        root_schedule = [min(f, traj.frame_count - 1) for f in plan.frame_schedule]
    elif "root_anchors" in cfg:
        root_anchors = np.asarray(cfg["root_anchors"], dtype=np.float64)
        root_schedule = list(cfg["root_schedule"])

    wrist_anchors = hand_anchors = key_frames = None
    if "wrist_anchors" in cfg:
        wrist_anchors = np.asarray(cfg["wrist_anchors"], dtype=np.float64)
        hand_anchors = np.asarray(cfg["hand_anchors"], dtype=np.float64)
        key_frames = list(cfg["key_frames"])

    path_cloud = None
    if "scene" in cfg:
        path_cloud = _load_scene_cloud(cfg["scene"])

    g = cfg.get("guidance", {})
    params = GuidanceParams(
        tau=g.get("tau", 0.1),
        lambda1=g.get("lambda1", 1.0),
        lambda2=g.get("lambda2", 1.0),
        lambda3=g.get("lambda3", 0.01),
        repulsion_radius=g.get("repulsion_radius", 0.3),
    )
    steps = int(g.get("steps", 10))

    log_lines = ["step,root,hand,repulsion,total"]
    for step in range(steps):
        traj, losses = guided_update(
            traj,
            params,
            root_anchors=root_anchors,
            root_schedule=root_schedule,
            wrist_anchors=wrist_anchors,
            hand_anchors=hand_anchors,
            key_frames=key_frames,
            path_cloud=path_cloud,
        )
        log_lines.append(
            "%d,%.9g,%.9g,%.9g,%.9g"
            % (step, losses["root"], losses["hand"], losses["repulsion"], losses["total"])
        )
    (out / "guided_trajectory.json").write_bytes(trajectory_to_json_bytes(traj))
    (out / "loss_log.csv").write_bytes(("\n".join(log_lines) + "\n").encode("ascii"))
    return EXIT_OK


def _load_task(cfg, object_mesh):
    task = cfg["task"]

    def pose(key):
        if key + "_pose" in task:
            return np.asarray(task[key + "_pose"], dtype=np.float64)
        m = np.eye(4)
        m[:3, 3] = np.asarray(task[key], dtype=np.float64)
        return m

    return ObjectTask(start_pose=pose("start"), target_pose=pose("target"), mesh=object_mesh)


def cmd_eval(cfg):
    out = _outdir(cfg)
    _echo_config(cfg, out)
    scene = SdfScene(_load_scene_mesh(cfg["scene_mesh"]))
    object_mesh = None
    if "object_mesh" in cfg:
        object_mesh = _load_scene_mesh(cfg["object_mesh"])
    task = _load_task(cfg, object_mesh)

    seq_paths = cfg["sequences"] if "sequences" in cfg else [cfg["sequence"]]
    reports = []
    for p in seq_paths:
        seq = sequence_from_json_bytes(Path(p).read_bytes())
        reports.append(
            evaluate(
                seq,
                scene,
                task,
                threshold=cfg.get("success_threshold", 0.05),
                contact_epsilon=cfg.get("contact_epsilon", 0.005),
            )
        )

    if len(reports) == 1 and "sequences" not in cfg:
        (out / "report.txt").write_bytes(reports[0].to_text().encode("ascii"))
    else:
        lines = [",".join(MetricReport.COLUMNS)]
        for r in reports:
            lines.append(
                ",".join("" if v is None else "%.6f" % v for v in r.row())
            )
        (out / "report.csv").write_bytes(("\n".join(lines) + "\n").encode("ascii"))
    return EXIT_OK


def main(argv=None):
    parser = argparse.ArgumentParser(prog="scene-nav", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("map", cmd_map),
        ("plan", cmd_plan),
        ("guide", cmd_guide),
        ("eval", cmd_eval),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument(
            "--set",
            action="append",
            metavar="KEY=VALUE",
            help="override a (dotted) config key; value parsed as JSON",
        )
        p.set_defaults(fn=fn)
    args = parser.parse_args(argv)

    try:
        cfg = _load_config(args)
        return args.fn(cfg)
    except InvalidNodeError as exc:
        print(f"error: invalid keypoints: {exc.nodes}", file=sys.stderr)
        return EXIT_INVALID_NODE
    except NoPathError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_PATH
    except GuidanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (SceneNavError, OSError, KeyError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc!r}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

"""HTTP facade for the interactive waypoint-adjustment loop.

Sessions are kept in memory; each session holds one immutable map plus
the operator's current keypoints. Mutations on a session serialize
through a per-session lock and bump its revision counter. The service
adds transport only: map bytes and plans are identical to the CLI's.

Run with:  uvicorn scene_nav.service:app
"""

import hashlib
import json
import threading
import uuid

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .errors import GeometryParseError, NoPathError, SceneNavError
from .fixtures import FIXTURES
from .geometry import PointCloud
from .obstacle_map import build_map, heatmap_png_bytes, map_csv_bytes, smooth_map
from .planner import PlannerConfig, plan_path, validate_keypoints


class Session:
    def __init__(self, smoothed_map, config):
        self.id = uuid.uuid4().hex
        self.map = smoothed_map
        self.config = config
        self.keypoints = None
        self.last_plan = None
        self.last_error = None
        self.revision = 0
        self.lock = threading.Lock()


def _error(status, code, message, **extra):
    return JSONResponse(
        status_code=status, content={"error": {"code": code, "message": message, **extra}}
    )


def _parse_xyz_text(text):
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if len(parts) < 3:
            raise GeometryParseError("xyz line needs 3 coordinates", line=lineno)
        try:
            rows.append([float(parts[0]), float(parts[1]), float(parts[2])])
        except ValueError:
            raise GeometryParseError("bad coordinate", line=lineno) from None
    if not rows:
        raise GeometryParseError("no points in upload")
    return PointCloud(np.array(rows))


def _validity_payload(checks):
    return [
        {
            "status": c["status"],
            "cell": list(c["cell"]) if c["cell"] is not None else None,
            "suggestion": list(c["suggestion"]) if c["suggestion"] is not None else None,
        }
        for c in checks
    ]


def create_app():
    app = FastAPI(title="scene-nav service")
    sessions = {}

    def get_session(session_id):
        return sessions.get(session_id)

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        try:
            body = await request.json()
        except json.JSONDecodeError:
            return _error(400, "bad_json", "request body is not valid JSON")
        try:
            if "fixture" in body:
                name = body["fixture"]
                if name not in FIXTURES:
                    return _error(400, "unknown_fixture", f"no fixture named {name!r}")
                cloud = FIXTURES[name]()
            elif "scene_xyz" in body:
                cloud = _parse_xyz_text(body["scene_xyz"])
            else:
                return _error(400, "missing_scene", "provide 'fixture' or 'scene_xyz'")
        except (GeometryParseError, SceneNavError) as exc:
            return _error(400, "parse_error", str(exc))

        config = {
            "cell_size": body.get("cell_size", 0.1),
            "z_band": tuple(body.get("z_band", (0.2, 2.0))),
            "kernel_radius": body.get("kernel_radius", 1),
            "lam": body.get("lam", 0.0),
            "impassable": body.get("impassable"),
            "stride": body.get("stride", 4),
            "base_height": body.get("base_height", 0.95),
            "frame_interval": body.get("frame_interval", 38),
            "strict": body.get("strict", False),
        }
        raw = build_map(cloud, cell_size=config["cell_size"], z_band=config["z_band"])
        smoothed = smooth_map(raw, config["kernel_radius"])
        session = Session(smoothed, config)
        sessions[session.id] = session
        csv = map_csv_bytes(smoothed)
        return {
            "session_id": session.id,
            "cells": list(smoothed.shape),
            "cell_size": smoothed.cell_size,
            "origin": smoothed.origin.tolist(),
            "map_checksum": hashlib.sha256(csv).hexdigest(),
            "revision": session.revision,
        }

    @app.get("/sessions/{session_id}/map")
    async def get_map(session_id: str, request: Request, format: str = None):
        session = get_session(session_id)
        if session is None:
            return _error(404, "unknown_session", "no such session")
        fmt = format
        if fmt is None:
            accept = request.headers.get("accept", "")
            fmt = "png" if "image/png" in accept else "csv"
        if fmt == "png":
            return Response(content=heatmap_png_bytes(session.map), media_type="image/png")
        return Response(content=map_csv_bytes(session.map), media_type="text/csv")

    @app.put("/sessions/{session_id}/keypoints")
    async def put_keypoints(session_id: str, request: Request):
        session = get_session(session_id)
        if session is None:
            return _error(404, "unknown_session", "no such session")
        try:
            body = await request.json()
        except json.JSONDecodeError:
            return _error(400, "bad_json", "request body is not valid JSON")
        keypoints = body.get("keypoints")
        if not keypoints:
            return _error(422, "empty_keypoints", "keypoint list is empty")
        try:
            arr = np.asarray(keypoints, dtype=np.float64)
            if arr.ndim != 2 or arr.shape[1] not in (2, 3):
                raise ValueError
        except (ValueError, TypeError):
            return _error(400, "bad_keypoints", "keypoints must be [x,y] or [x,y,z] rows")
        with session.lock:
            checks = validate_keypoints(session.map, arr)
            payload = _validity_payload(checks)
            strict = body.get("strict", session.config["strict"])
            if strict and any(c["status"] == "out_of_bounds" for c in checks):
                return _error(
                    422, "out_of_bounds", "keypoints outside map", validity=payload
                )
            session.keypoints = arr
            session.revision += 1
            return {
                "revision": session.revision,
                "validity": payload,
            }

    @app.post("/sessions/{session_id}/plan")
    async def post_plan(session_id: str):
        session = get_session(session_id)
        if session is None:
            return _error(404, "unknown_session", "no such session")
        with session.lock:
            if session.keypoints is None or session.keypoints.shape[0] < 2:
                return _error(409, "missing_keypoints", "store at least 2 keypoints first")
            checks = validate_keypoints(session.map, session.keypoints)
            if any(c["status"] != "walkable" for c in checks):
                return _error(
                    409,
                    "invalid_keypoints",
                    "keypoints must be walkable before planning",
                    validity=_validity_payload(checks),
                )
            cfg = session.config
            try:
                plan = plan_path(
                    session.map,
                    session.keypoints,
                    PlannerConfig(lam=cfg["lam"], impassable=cfg["impassable"]),
                    stride=cfg["stride"],
                    base_height=cfg["base_height"],
                    frame_interval=cfg["frame_interval"],
                )
            except NoPathError as exc:
                failure = {
                    "ok": False,
                    "error": {
                        "code": "no_path",
                        "message": str(exc),
                        "segment": exc.segment,
                        "start": list(exc.start),
                        "goal": list(exc.goal),
                        "explored": exc.explored,
                    },
                }
                session.last_plan = None
                session.last_error = failure["error"]
                session.revision += 1
                return failure
            session.last_plan = plan
            session.last_error = None
            session.revision += 1
            return {
                "ok": True,
                "revision": session.revision,
                "plan": json.loads(plan.to_json_bytes()),
            }

    return app


app = create_app()


def main():  # pragma: no cover
    import uvicorn

    uvicorn.run(app, host="127.0.0.1", port=8008)


if __name__ == "__main__":  # pragma: no cover
    main()

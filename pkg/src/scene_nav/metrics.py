"""Evaluation suite: object locomotion (distance / time / success) and
SDF-based interaction metrics (penetration rate, mean and max
penetration volume, hand-object contact rate)."""

import json
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import SchemaError
from .geometry import TriMesh
from .sdf import SdfScene, penetration_score

SUCCESS_THRESHOLD = 0.05  # meters
CONTACT_EPSILON = 0.005  # meters; "contact" is not quantified upstream


@dataclass(frozen=True)
class MotionSequence:
    """Synchronized human vertex frames and object poses."""

    human: np.ndarray  # (T, V, 3) body vertices per frame
    object_poses: np.ndarray  # (T, 4, 4)
    frame_rate: float = 30.0
    hand_vertex_indices: np.ndarray | None = None  # indices into V
    grasp_frames: tuple | None = None  # (first, last) manipulation frames

    def __post_init__(self):
        human = np.asarray(self.human, dtype=np.float64)
        poses = np.asarray(self.object_poses, dtype=np.float64)
        if human.ndim != 3 or human.shape[2] != 3:
            raise ValueError(f"bad human frame shape {human.shape}")
        if poses.shape != (human.shape[0], 4, 4):
            raise ValueError("human and object frame counts differ")
        if self.frame_rate <= 0:
            raise ValueError("frame_rate must be > 0")
        object.__setattr__(self, "human", human)
        object.__setattr__(self, "object_poses", poses)
        if self.hand_vertex_indices is not None:
            object.__setattr__(
                self,
                "hand_vertex_indices",
                np.asarray(self.hand_vertex_indices, dtype=np.int64),
            )

    @property
    def frame_count(self):
        return self.human.shape[0]


@dataclass(frozen=True)
class ObjectTask:
    start_pose: np.ndarray  # (4, 4)
    target_pose: np.ndarray  # (4, 4)
    mesh: TriMesh | None = None

    def __post_init__(self):
        for name in ("start_pose", "target_pose"):
            m = np.asarray(getattr(self, name), dtype=np.float64).reshape(4, 4)
            r = m[:3, :3]
            if not np.allclose(r @ r.T, np.eye(3), atol=1e-6):
                raise ValueError(f"{name} rotation is not orthonormal")
            object.__setattr__(self, name, m)


@dataclass(frozen=True)
class MetricReport:
    dist: float
    time: float
    success: bool
    pene_rate: float
    pene_mean: float
    pene_max: float
    contact_rate: float | None  # None when the manipulation phase is empty

    COLUMNS = (
        "Dist.",
        "Time",
        "Rate",
        "Pene. Rate",
        "Pene. Mean",
        "Pene. Max",
        "Contact Rate",
    )

    def row(self):
        return (
            self.dist,
            self.time,
            1.0 if self.success else 0.0,
            self.pene_rate,
            self.pene_mean,
            self.pene_max,
            self.contact_rate,
        )

    def to_text(self):
        lines = []
        for name, value in zip(self.COLUMNS, self.row()):
            if value is None:
                lines.append(f"{name}: undefined")
            else:
                lines.append(f"{name}: {value:.6f}")
        lines.append("# units: meters / seconds; penetration in meters summed over vertices")
        return "\n".join(lines) + "\n"


def locomotion_metrics(seq: MotionSequence, task: ObjectTask, threshold=SUCCESS_THRESHOLD):
    """Final-position error, wall time, and thresholded success."""
    if seq.frame_count == 0:
        raise ValueError("empty sequence")
    p_final = seq.object_poses[-1][:3, 3]
    p_target = task.target_pose[:3, 3]
    dist = float(np.linalg.norm(p_final - p_target))
    time = (seq.frame_count - 1) / seq.frame_rate
    return dist, time, dist <= threshold


def penetration_rate(seq: MotionSequence, scene: SdfScene):
    """Fraction of frames with at least one vertex inside the scene."""
    hits = 0
    for f in range(seq.frame_count):
        if np.any(scene.sdf(seq.human[f]) < 0.0):
            hits += 1
    return hits / seq.frame_count


def penetration_volume(seq: MotionSequence, scene: SdfScene):
    """(mean, max) over frames of the per-frame depth-weighted sum."""
    scores = np.array(
        [penetration_score(scene, seq.human[f]) for f in range(seq.frame_count)]
    )
    return float(scores.mean()), float(scores.max())


def contact_rate(seq: MotionSequence, object_mesh: TriMesh, epsilon=CONTACT_EPSILON):
    """Fraction of manipulation-phase frames with a hand vertex within
    ``epsilon`` of the posed object surface.

    Returns None (undefined) when the manipulation phase is empty.
    """
    if seq.hand_vertex_indices is None or seq.grasp_frames is None:
        return None
    first, last = seq.grasp_frames
    frames = range(max(0, first), min(seq.frame_count - 1, last) + 1)
    frames = [f for f in frames]
    if not frames:
        return None
    base = object_mesh.triangles  # (F, 3, 3)
    hits = 0
    for f in frames:
        pose = seq.object_poses[f]
        tris = base @ pose[:3, :3].T + pose[:3, 3]
        hand = seq.human[f][seq.hand_vertex_indices]
        d = _kernels.point_mesh_distance(hand, tris)
        if d.min() <= epsilon:
            hits += 1
    return hits / len(frames)


def evaluate(
    seq: MotionSequence,
    scene: SdfScene,
    task: ObjectTask,
    threshold=SUCCESS_THRESHOLD,
    contact_epsilon=CONTACT_EPSILON,
):
    """Full metric report for one sequence."""
    dist, time, success = locomotion_metrics(seq, task, threshold)
    mean, peak = penetration_volume(seq, scene)
    contact = None
    if task.mesh is not None:
        contact = contact_rate(seq, task.mesh, contact_epsilon)
    return MetricReport(
        dist=dist,
        time=time,
        success=success,
        pene_rate=penetration_rate(seq, scene),
        pene_mean=mean,
        pene_max=peak,
        contact_rate=contact,
    )


# ---------------------------------------------------------------------------
# sequence file schema

SEQUENCE_SCHEMA = "scene-nav/sequence/1"


def sequence_to_json_bytes(seq: MotionSequence):
    doc = {
        "schema": SEQUENCE_SCHEMA,
        "frame_rate": seq.frame_rate,
        "human": seq.human.tolist(),
        "object_poses": seq.object_poses.tolist(),
    }
    if seq.hand_vertex_indices is not None:
        doc["hand_vertex_indices"] = seq.hand_vertex_indices.tolist()
    if seq.grasp_frames is not None:
        doc["grasp_frames"] = list(seq.grasp_frames)
    return (json.dumps(doc, indent=1) + "\n").encode("ascii")


def sequence_from_json_bytes(data):
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"sequence file is not valid JSON: {exc}") from None
    if doc.get("schema") != SEQUENCE_SCHEMA:
        raise SchemaError(f"expected schema {SEQUENCE_SCHEMA}, got {doc.get('schema')!r}")
    try:
        return MotionSequence(
            human=np.array(doc["human"], dtype=np.float64),
            object_poses=np.array(doc["object_poses"], dtype=np.float64),
            frame_rate=float(doc.get("frame_rate", 30.0)),
            hand_vertex_indices=doc.get("hand_vertex_indices"),
            grasp_frames=tuple(doc["grasp_frames"]) if "grasp_frames" in doc else None,
        )
    except (KeyError, ValueError) as exc:
        raise SchemaError(f"malformed sequence file: {exc}") from None

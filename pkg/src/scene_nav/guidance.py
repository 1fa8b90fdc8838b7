"""Gradient-guidance loss stack and the guided mean update.

Attraction losses pull the root along planned waypoints and the hand
onto grasp anchors; the repulsion loss pushes joints away from nearby
scene points. One guided step moves the trajectory down the weighted
gradient. All gradients are analytic and verified against central
finite differences in the test suite.
"""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import GuidanceError, SchemaError
from .geometry import PointCloud

N_BODY_JOINTS = 22
N_HAND_ROTATIONS = 16  # wrist + 15 finger joints, global 6D
DEFAULT_REPULSION_RADIUS = 0.3


@dataclass(frozen=True)
class SkeletonPose:
    """One body pose: 22 joints, plus optional wrist position and 16
    global hand rotations in 6D form."""

    joints: np.ndarray  # (22, 3)
    wrist: np.ndarray | None = None  # (3,)
    hand_rotations: np.ndarray | None = None  # (16, 6)

    def __post_init__(self):
        j = np.asarray(self.joints, dtype=np.float64)
        if j.shape != (N_BODY_JOINTS, 3):
            raise ValueError(f"expected ({N_BODY_JOINTS}, 3) joints, got {j.shape}")
        object.__setattr__(self, "joints", j)
        if self.wrist is not None:
            object.__setattr__(
                self, "wrist", np.asarray(self.wrist, dtype=np.float64).reshape(3)
            )
        if self.hand_rotations is not None:
            h = np.asarray(self.hand_rotations, dtype=np.float64)
            if h.shape != (N_HAND_ROTATIONS, 6):
                raise ValueError(f"expected ({N_HAND_ROTATIONS}, 6) hand rotations")
            object.__setattr__(self, "hand_rotations", h)

    @property
    def root(self):
        return self.joints[0]


@dataclass(frozen=True)
class AnchorTuple:
    """Guidance targets: root waypoints, wrist positions, hand rotations.

    a_w and a_h always have equal length (typically 2: pickup and
    placement); hands may be absent entirely for root-only anchors.
    """

    a_r: np.ndarray  # (Lr, 3)
    a_w: np.ndarray | None = None  # (Lh, 3)
    a_h: np.ndarray | None = None  # (Lh, 16, 6)

    def __post_init__(self):
        object.__setattr__(
            self, "a_r", np.asarray(self.a_r, dtype=np.float64).reshape(-1, 3)
        )
        if (self.a_w is None) != (self.a_h is None):
            raise ValueError("a_w and a_h must be provided together")
        if self.a_w is not None:
            a_w = np.asarray(self.a_w, dtype=np.float64).reshape(-1, 3)
            a_h = np.asarray(self.a_h, dtype=np.float64).reshape(
                -1, N_HAND_ROTATIONS, 6
            )
            if a_w.shape[0] != a_h.shape[0]:
                raise ValueError("a_w and a_h lengths differ")
            object.__setattr__(self, "a_w", a_w)
            object.__setattr__(self, "a_h", a_h)


@dataclass(frozen=True)
class GuidanceParams:
    tau: float = 0.1
    lambda1: float = 1.0  # root attraction
    lambda2: float = 1.0  # hand attraction
    lambda3: float = 0.01  # scene repulsion
    repulsion_radius: float = DEFAULT_REPULSION_RADIUS
    guided_timesteps: tuple = tuple(range(10))  # last denoising steps

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError("tau must be >= 0")
        if self.repulsion_radius <= 0:
            raise ValueError("repulsion_radius must be > 0")


@dataclass(frozen=True)
class TrajectoryState:
    """Per-frame pose sequence under refinement."""

    joints: np.ndarray  # (L, 22, 3)
    wrist: np.ndarray  # (L, 3)
    hand: np.ndarray  # (L, 16, 6)

    def __post_init__(self):
        j = np.asarray(self.joints, dtype=np.float64)
        if j.ndim != 3 or j.shape[1:] != (N_BODY_JOINTS, 3):
            raise ValueError(f"bad joints shape {j.shape}")
        L = j.shape[0]
        w = np.asarray(self.wrist, dtype=np.float64).reshape(L, 3)
        h = np.asarray(self.hand, dtype=np.float64).reshape(L, N_HAND_ROTATIONS, 6)
        for arr in (j, w, h):
            if not np.all(np.isfinite(arr)):
                raise ValueError("non-finite trajectory entries")
        object.__setattr__(self, "joints", j)
        object.__setattr__(self, "wrist", w)
        object.__setattr__(self, "hand", h)

    @property
    def frame_count(self):
        return self.joints.shape[0]

    @staticmethod
    def zeros(n_frames):
        return TrajectoryState(
            joints=np.zeros((n_frames, N_BODY_JOINTS, 3)),
            wrist=np.zeros((n_frames, 3)),
            hand=np.zeros((n_frames, N_HAND_ROTATIONS, 6)),
        )

    def copy(self):
        return TrajectoryState(
            joints=self.joints.copy(), wrist=self.wrist.copy(), hand=self.hand.copy()
        )


# ---------------------------------------------------------------------------
# losses


def scene_distance_loss(pose: SkeletonPose, local_cloud: PointCloud):
    """Negative mean squared joint-to-scene-point distance.

    Minimizing pushes joints away from the local scene cloud. Returns
    (value, gradient w.r.t. the 22 joints). Empty cloud: (0, zeros).
    """
    joints = pose.joints
    pts = local_cloud.points
    n = pts.shape[0]
    if n == 0:
        return 0.0, np.zeros_like(joints)
    diff = joints[:, None, :] - pts[None, :, :]  # (22, N, 3)
    value = -float(np.sum(diff * diff)) / n
    grad = -(2.0 / n) * diff.sum(axis=1)
    return value, grad


def root_loss(traj: TrajectoryState, a_r, schedule):
    """Squared distance of the root joint to its waypoint at each
    scheduled frame. Returns (value, gradient w.r.t. traj.joints)."""
    a_r = np.asarray(a_r, dtype=np.float64).reshape(-1, 3)
    schedule = list(schedule)
    if len(schedule) != a_r.shape[0]:
        raise GuidanceError("root schedule and anchor counts differ")
    if schedule and max(schedule) >= traj.frame_count:
        raise GuidanceError("root schedule frame beyond trajectory length")
    grad = np.zeros_like(traj.joints)
    value = 0.0
    for anchor, frame in zip(a_r, schedule):
        d = traj.joints[frame, 0] - anchor
        value += float(d @ d)
        grad[frame, 0] += 2.0 * d
    return value, grad


def hand_loss(traj: TrajectoryState, a_w, a_h, key_frames):
    """Wrist-position plus 6D-rotation squared residuals at key frames.

    Returns (value, grad w.r.t. traj.wrist, grad w.r.t. traj.hand).
    """
    a_w = np.asarray(a_w, dtype=np.float64).reshape(-1, 3)
    a_h = np.asarray(a_h, dtype=np.float64).reshape(-1, N_HAND_ROTATIONS, 6)
    key_frames = list(key_frames)
    if not (len(key_frames) == a_w.shape[0] == a_h.shape[0]):
        raise GuidanceError("key frame and hand anchor counts differ")
    if key_frames and max(key_frames) >= traj.frame_count:
        raise GuidanceError("key frame beyond trajectory length")
    grad_w = np.zeros_like(traj.wrist)
    grad_h = np.zeros_like(traj.hand)
    value = 0.0
    for k, frame in enumerate(key_frames):
        dw = traj.wrist[frame] - a_w[k]
        dh = traj.hand[frame] - a_h[k]
        value += float(dw @ dw) + float(np.sum(dh * dh))
        grad_w[frame] += 2.0 * dw
        grad_h[frame] += 2.0 * dh
    return value, grad_w, grad_h


def scene_repulsion_loss(
    traj: TrajectoryState, path_cloud: PointCloud, radius=DEFAULT_REPULSION_RADIUS
):
    """Negative squared distances to scene points within ``radius`` of
    each joint; empty neighborhoods contribute nothing.

    The neighborhood mask is fixed at evaluation time, so the returned
    gradient is that of the fixed-mask objective.
    """
    if radius <= 0:
        raise ValueError("radius must be > 0")
    grad = np.zeros_like(traj.joints)
    if len(path_cloud) == 0:
        return 0.0, grad
    pts = path_cloud.points
    tree = cKDTree(pts)
    flat = traj.joints.reshape(-1, 3)
    neighborhoods = tree.query_ball_point(flat, r=radius)
    value = 0.0
    gflat = grad.reshape(-1, 3)
    for k, idx in enumerate(neighborhoods):
        if not idx:
            continue
        d = flat[k] - pts[idx]  # (m, 3)
        value -= float(np.sum(d * d))
        gflat[k] -= 2.0 * d.sum(axis=0)
    return value, grad


def guided_update(
    traj: TrajectoryState,
    params: GuidanceParams,
    root_anchors=None,
    root_schedule=None,
    wrist_anchors=None,
    hand_anchors=None,
    key_frames=None,
    path_cloud=None,
):
    """One gradient step on the weighted sum of active losses.

    Returns (new trajectory, loss breakdown). tau=0 returns an exact
    copy. A non-finite gradient raises GuidanceError and leaves the
    input untouched.
    """
    losses = {"root": 0.0, "hand": 0.0, "repulsion": 0.0}
    if params.tau == 0.0:
        new = traj.copy()
        if root_anchors is not None:
            losses["root"], _ = root_loss(traj, root_anchors, root_schedule)
        if wrist_anchors is not None:
            losses["hand"], _, _ = hand_loss(traj, wrist_anchors, hand_anchors, key_frames)
        if path_cloud is not None:
            losses["repulsion"], _ = scene_repulsion_loss(
                traj, path_cloud, params.repulsion_radius
            )
        losses["total"] = _total(losses, params)
        return new, losses

    g_joints = np.zeros_like(traj.joints)
    g_wrist = np.zeros_like(traj.wrist)
    g_hand = np.zeros_like(traj.hand)
    if root_anchors is not None:
        losses["root"], g = root_loss(traj, root_anchors, root_schedule)
        g_joints += params.lambda1 * g
    if wrist_anchors is not None:
        losses["hand"], gw, gh = hand_loss(traj, wrist_anchors, hand_anchors, key_frames)
        g_wrist += params.lambda2 * gw
        g_hand += params.lambda2 * gh
    if path_cloud is not None:
        losses["repulsion"], g = scene_repulsion_loss(
            traj, path_cloud, params.repulsion_radius
        )
        g_joints += params.lambda3 * g

    for g in (g_joints, g_wrist, g_hand):
        if not np.all(np.isfinite(g)):
            raise GuidanceError("non-finite guidance gradient")
    losses["total"] = _total(losses, params)
    new = TrajectoryState(
        joints=traj.joints - params.tau * g_joints,
        wrist=traj.wrist - params.tau * g_wrist,
        hand=traj.hand - params.tau * g_hand,
    )
    return new, losses


def _total(losses, params):
    return (
        params.lambda1 * losses["root"]
        + params.lambda2 * losses["hand"]
        + params.lambda3 * losses["repulsion"]
    )


# ---------------------------------------------------------------------------
# trajectory file schema

TRAJECTORY_SCHEMA = "scene-nav/trajectory/1"


def trajectory_to_json_bytes(traj: TrajectoryState):
    doc = {
        "schema": TRAJECTORY_SCHEMA,
        "frames": [
            {
                "joints": traj.joints[f].tolist(),
                "wrist": traj.wrist[f].tolist(),
                "hand_rotations": traj.hand[f].tolist(),
            }
            for f in range(traj.frame_count)
        ],
    }
    return (json.dumps(doc, indent=1) + "\n").encode("ascii")


def trajectory_from_json_bytes(data):
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"trajectory file is not valid JSON: {exc}") from None
    if doc.get("schema") != TRAJECTORY_SCHEMA:
        raise SchemaError(
            f"expected schema {TRAJECTORY_SCHEMA}, got {doc.get('schema')!r}"
        )
    frames = doc.get("frames", [])
    if not frames:
        raise SchemaError("trajectory file has no frames")
    try:
        return TrajectoryState(
            joints=np.array([f["joints"] for f in frames], dtype=np.float64),
            wrist=np.array([f["wrist"] for f in frames], dtype=np.float64),
            hand=np.array([f["hand_rotations"] for f in frames], dtype=np.float64),
        )
    except (KeyError, ValueError) as exc:
        raise SchemaError(f"malformed trajectory frame: {exc}") from None

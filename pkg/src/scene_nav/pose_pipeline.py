"""Deterministic machinery around externally supplied grasp-pose
candidates: scene/object feature assembly, collision-aware candidate
filtering, and anchor extraction."""

import json
from dataclasses import dataclass, field

import numpy as np

from .bps import bps_encode, directional_offsets, farthest_point_sample, make_basis
from .errors import SchemaError
from .geometry import PointCloud, crop_volume_for_object, volumetric_sample
from .guidance import AnchorTuple, SkeletonPose
from .rotations import relative_to_global, rot_to_6d
from .sdf import SdfScene, penetration_score

N_BODY_SAMPLES = 400
DEFAULT_CANDIDATE_COUNT = 10


@dataclass(frozen=True)
class SgapFeatureVector:
    """Concatenation-ready pose/scene feature block.

    theta and beta are pass-through body-model parameters; the scene and
    object encodings are computed here. ``degenerate`` marks an empty
    scene crop, where the scene encoding is undefined.
    """

    theta: np.ndarray
    beta: np.ndarray
    body_samples: np.ndarray  # (400, 3)
    offsets: np.ndarray  # (400, 3) body -> nearest object surface
    head_dir: np.ndarray  # unit (3,)
    object_translation: np.ndarray  # (3,)
    object_bps: np.ndarray  # (1024,)
    scene_bps: np.ndarray  # (1024,)
    degenerate: bool = False
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        hd = np.asarray(self.head_dir, dtype=np.float64).reshape(3)
        if abs(np.linalg.norm(hd) - 1.0) > 1e-9:
            raise ValueError("head_dir must be unit length")
        if np.asarray(self.object_bps).shape != (1024,) or np.asarray(
            self.scene_bps
        ).shape != (1024,):
            raise ValueError("BPS encodings must have length 1024")
        if np.asarray(self.offsets).shape != (N_BODY_SAMPLES, 3):
            raise ValueError(f"offsets must be ({N_BODY_SAMPLES}, 3)")

    def to_json_bytes(self):
        doc = {
            "schema": "scene-nav/features/1",
            "theta": np.asarray(self.theta).tolist(),
            "beta": np.asarray(self.beta).tolist(),
            "body_samples": np.asarray(self.body_samples).tolist(),
            "offsets": np.asarray(self.offsets).tolist(),
            "head_dir": np.asarray(self.head_dir).tolist(),
            "object_translation": np.asarray(self.object_translation).tolist(),
            "object_bps": np.asarray(self.object_bps).tolist(),
            "scene_bps": np.asarray(self.scene_bps).tolist(),
            "degenerate": bool(self.degenerate),
            "metadata": self.metadata,
        }
        return (json.dumps(doc, indent=1, sort_keys=True) + "\n").encode("ascii")


@dataclass(frozen=True)
class PoseCandidate:
    """One externally generated pose plus the body points used for
    collision scoring."""

    pose: SkeletonPose
    body_points: np.ndarray  # (M, 3)
    provenance: str = ""
    hand_local: np.ndarray | None = None  # (16, 3, 3) parent-relative
    hand_parents: tuple | None = None

    def __post_init__(self):
        object.__setattr__(
            self,
            "body_points",
            np.asarray(self.body_points, dtype=np.float64).reshape(-1, 3),
        )


def assemble_features(
    body_vertices,
    head_dir,
    object_mesh,
    object_translation,
    scene_mesh,
    theta=(),
    beta=(),
    voxel_edge=0.08,
    sample_seed=0,
    bps_seed=0,
):
    """Build the feature vector for one pose/object/scene configuration.

    Deterministic given the two seeds; both are echoed into metadata.
    The object BPS uses an object-centered basis; the scene BPS basis is
    centered on the crop volume.
    """
    t_o = np.asarray(object_translation, dtype=np.float64).reshape(3)
    hd = np.asarray(head_dir, dtype=np.float64).reshape(3)
    n = np.linalg.norm(hd)
    if n == 0:
        raise ValueError("head_dir must be nonzero")
    hd = hd / n

    body_vertices = np.asarray(body_vertices, dtype=np.float64).reshape(-1, 3)
    idx = farthest_point_sample(body_vertices, N_BODY_SAMPLES, seed=sample_seed)
    if idx.shape[0] < N_BODY_SAMPLES:
        raise ValueError(
            f"need at least {N_BODY_SAMPLES} body vertices, got {body_vertices.shape[0]}"
        )
    samples = body_vertices[idx]

    object_cloud = PointCloud(object_mesh.vertices + t_o)
    offsets = directional_offsets(samples, object_cloud)
    object_bps = bps_encode(
        PointCloud(object_mesh.vertices), make_basis(np.zeros(3), seed=bps_seed)
    )

    crop = crop_volume_for_object(t_o)
    scene_sample = volumetric_sample(scene_mesh, crop, voxel_edge, seed=sample_seed)
    degenerate = len(scene_sample.cloud) == 0
    crop_center = 0.5 * (crop.vmin + crop.vmax)
    if degenerate:
        scene_bps = np.zeros(1024)
    else:
        scene_bps = bps_encode(scene_sample.cloud, make_basis(crop_center, seed=bps_seed))

    return SgapFeatureVector(
        theta=np.asarray(theta, dtype=np.float64),
        beta=np.asarray(beta, dtype=np.float64),
        body_samples=samples,
        offsets=offsets,
        head_dir=hd,
        object_translation=t_o,
        object_bps=object_bps,
        scene_bps=scene_bps,
        degenerate=degenerate,
        metadata={
            "sample_seed": sample_seed,
            "bps_seed": bps_seed,
            "voxel_edge": voxel_edge,
            "interior_skipped": scene_sample.interior_skipped,
        },
    )


def filter_candidates(candidates, scene: SdfScene):
    """Select the candidate with minimal aggregate collision volume.

    The score is the same depth-weighted penetration sum used by the
    metrics module. Ties break on candidate index. Returns
    (selected candidate, index, scores).
    """
    if not candidates:
        raise ValueError("need at least one candidate")
    scores = [penetration_score(scene, c.body_points) for c in candidates]
    best = int(np.argmin(scores))
    return candidates[best], best, scores


def extract_anchors(candidate: PoseCandidate):
    """Project a candidate pose to its spatial anchor entry.

    Parent-relative hand rotations are composed to globals first; a pose
    without hand data yields a root-only anchor.
    """
    pose = candidate.pose
    root = pose.root.reshape(1, 3)
    hand6d = pose.hand_rotations
    if hand6d is None and candidate.hand_local is not None:
        globals_ = relative_to_global(candidate.hand_parents, candidate.hand_local)
        hand6d = rot_to_6d(globals_)
    if pose.wrist is None or hand6d is None:
        return AnchorTuple(a_r=root)
    return AnchorTuple(
        a_r=root,
        a_w=pose.wrist.reshape(1, 3),
        a_h=hand6d.reshape(1, 16, 6),
    )


# ---------------------------------------------------------------------------
# candidate pose file schema

CANDIDATES_SCHEMA = "scene-nav/pose-candidates/1"


def candidates_from_json_bytes(data):
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"candidate file is not valid JSON: {exc}") from None
    if doc.get("schema") != CANDIDATES_SCHEMA:
        raise SchemaError(f"expected schema {CANDIDATES_SCHEMA}, got {doc.get('schema')!r}")
    out = []
    for k, entry in enumerate(doc.get("candidates", [])):
        try:
            pose = SkeletonPose(
                joints=np.array(entry["joints"], dtype=np.float64),
                wrist=entry.get("wrist"),
                hand_rotations=entry.get("hand_rotations"),
            )
            out.append(
                PoseCandidate(
                    pose=pose,
                    body_points=np.array(
                        entry.get("body_points", entry["joints"]), dtype=np.float64
                    ),
                    provenance=entry.get("provenance", f"candidate-{k}"),
                    hand_local=(
                        np.array(entry["hand_local"], dtype=np.float64)
                        if "hand_local" in entry
                        else None
                    ),
                    hand_parents=(
                        tuple(entry["hand_parents"]) if "hand_parents" in entry else None
                    ),
                )
            )
        except (KeyError, ValueError) as exc:
            raise SchemaError(f"malformed candidate {k}: {exc}") from None
    if not out:
        raise SchemaError("candidate file has no candidates")
    return out


def candidates_to_json_bytes(candidates):
    entries = []
    for c in candidates:
        entry = {
            "joints": c.pose.joints.tolist(),
            "body_points": c.body_points.tolist(),
            "provenance": c.provenance,
        }
        if c.pose.wrist is not None:
            entry["wrist"] = c.pose.wrist.tolist()
        if c.pose.hand_rotations is not None:
            entry["hand_rotations"] = c.pose.hand_rotations.tolist()
        if c.hand_local is not None:
            entry["hand_local"] = c.hand_local.tolist()
            entry["hand_parents"] = list(c.hand_parents)
        entries.append(entry)
    doc = {"schema": CANDIDATES_SCHEMA, "candidates": entries}
    return (json.dumps(doc, indent=1) + "\n").encode("ascii")

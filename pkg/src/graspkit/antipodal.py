"""Antipodal grasp-candidate sampling, scoring, and selection.

Seeds are drawn uniformly from the (cropped) cloud with a counter-based
generator so draw j is reproducible independently of evaluation order.
Each seed's surface normal becomes the gripper closing axis (x, pointing
into the surface); a sweep of rotations about it gives the candidate
poses. A candidate is scored by how antipodal the contact normals are:
cost = 1 - min over fingers of mean |n . x|, lower is better, and the
candidate is rejected when contacts are missing, alignment falls below
the antipodal threshold, or cloud points penetrate the gripper solids.

Gripper frame and solids (pose maps gripper frame -> cloud frame):
  origin      left fingertip, placed at the seed point
  x           closing axis; the right finger sits at x = opening
  z           approach axis, palm -> fingertips
  fingers     thin plates at x in [-ft, 0] and [opening, opening+ft],
              cross-section |y| <= fd/2, -fd <= z <= 0
  palm        everything behind z = -(fd + clearance) inside the
              gripper footprint blocks, modeling palm plus wrist
The right finger closes inward from max_opening, so its swept volume
lies inside the closing corridor beyond the measured span, which is
empty by construction and needs no separate test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .camera import RigidPose
from .cloud import NormalEstimate, PointCloud, crop, patch_normal
from .errors import DegeneratePatch, EmptyCloud, NoValidGrasp, PatchTooSmall

REJECT_PENETRATION = "penetration"
REJECT_NO_CONTACT = "no_contact"
REJECT_NOT_ANTIPODAL = "not_antipodal"

OPENING_CLEARANCE = 2e-3  # added to the measured span before closing
_PEN_EPS = 1e-9  # boundary slack so surface points do not self-collide


@dataclass(frozen=True)
class GripperModel:
    max_opening: float = 0.08
    finger_thickness: float = 0.002
    finger_depth: float = 0.02
    palm_clearance: float = 0.02
    mu_cos: float = 0.9
    # Sensor-noise allowance: points within this depth of the inner
    # finger face count as touching rather than penetrating.
    contact_skin: float = 0.001

    def __post_init__(self):
        for name in ("max_opening", "finger_thickness", "finger_depth", "palm_clearance"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if not (0.0 < self.mu_cos <= 1.0):
            raise ValueError(f"mu_cos must be in (0, 1], got {self.mu_cos}")
        if not (0.0 <= self.contact_skin < self.finger_thickness):
            raise ValueError("contact_skin must be in [0, finger_thickness)")


@dataclass(frozen=True)
class SamplerConfig:
    n_seeds: int = 64
    n_orientations: int = 8
    rng_seed: int = 0
    patch_k: int = 30
    patch_radius: float | None = None

    def __post_init__(self):
        if self.n_seeds < 1 or self.n_orientations < 1:
            raise ValueError("n_seeds and n_orientations must be >= 1")


@dataclass(frozen=True)
class Rejection:
    reason: str


@dataclass
class GraspCandidate:
    pose: RigidPose
    seed_index: int
    orientation_index: int
    cost: float
    contacts: tuple[np.ndarray, np.ndarray]


def seed_rng(rng_seed: int, draw_index: int) -> np.random.Generator:
    """Counter-based generator for draw `draw_index` of stream `rng_seed`."""
    key = int(rng_seed) & 0xFFFFFFFFFFFFFFFF
    return np.random.Generator(np.random.Philox(counter=[draw_index, 0, 0, 0], key=key))


def sample_seed(
    cloud: PointCloud,
    rng: np.random.Generator,
    patch_k: int = 30,
    patch_radius: float | None = None,
    viewpoint=None,
) -> tuple[int, NormalEstimate]:
    """Draw one uniform seed point and estimate its surface normal.

    When the cloud carries stored normals the estimated direction is
    sign-matched to the stored one; otherwise it points toward the
    viewpoint (camera origin by default).
    """
    if len(cloud) == 0:
        raise EmptyCloud("cannot sample from an empty cloud")
    idx = int(rng.integers(0, len(cloud)))
    est = patch_normal(cloud, idx, k=patch_k, radius=patch_radius, viewpoint=viewpoint)
    if cloud.normals is not None and float(est.normal @ cloud.normals[idx]) < 0.0:
        est = NormalEstimate(normal=-est.normal, planarity=est.planarity)
    return idx, est


def candidate_poses(
    seed_point, normal, cfg: SamplerConfig, gripper: GripperModel
) -> list[RigidPose]:
    """Gripper poses closing along -normal at equally spaced roll angles.

    The roll reference seeds the y axis from the world z axis projected
    out of the closing axis (world x when the two are parallel), so the
    sweep is deterministic without extra randomness.
    """
    seed = np.asarray(seed_point, dtype=np.float64)
    x = -np.asarray(normal, dtype=np.float64)
    x = x / np.linalg.norm(x)
    y0 = np.array([0.0, 0.0, 1.0]) - x[2] * x
    if np.linalg.norm(y0) < 1e-8:
        y0 = np.array([1.0, 0.0, 0.0]) - x[0] * x
    y0 = y0 / np.linalg.norm(y0)
    z0 = np.cross(x, y0)
    poses = []
    for i in range(cfg.n_orientations):
        phi = 2.0 * np.pi * i / cfg.n_orientations
        y = np.cos(phi) * y0 + np.sin(phi) * z0
        z = np.cross(x, y)
        poses.append(RigidPose(np.column_stack([x, y, z]), seed))
    return poses


def _contact_alignment(cloud, idx, x_world, cache, patch_k, patch_radius):
    """Mean |n . x| over a contact slab plus the per-point values.

    Points whose normal cannot be estimated (degenerate patch) drop out
    of the slab; returns (mean, kept indices, |cos| per kept index).
    """
    if cloud.normals is not None:
        cos = np.abs(cloud.normals[idx] @ x_world)
        return float(cos.mean()), idx, cos
    kept = []
    cos_vals = []
    for i in idx:
        i = int(i)
        if i not in cache:
            try:
                cache[i] = patch_normal(cloud, i, k=patch_k, radius=patch_radius).normal
            except (DegeneratePatch, PatchTooSmall):
                cache[i] = None
        n = cache[i]
        if n is None:
            continue
        kept.append(i)
        cos_vals.append(abs(float(n @ x_world)))
    if not kept:
        return 0.0, np.empty(0, dtype=np.int64), np.empty(0)
    cos = np.array(cos_vals)
    return float(cos.mean()), np.array(kept, dtype=np.int64), cos


def score_candidate(
    cloud: PointCloud,
    pose: RigidPose,
    gripper: GripperModel,
    patch_k: int = 30,
    patch_radius: float | None = None,
    _normal_cache: dict | None = None,
):
    """Score one gripper pose against the cloud.

    Returns (cost, (left contact indices, right contact indices)) for an
    accepted candidate or a Rejection(reason). Acceptance uses the mean
    alignment of each full contact slab; the reported contact indices
    are the slab points individually meeting the antipodal threshold
    (the mean bound guarantees at least one per finger).
    """
    g = gripper
    local = (cloud.points - pose.translation) @ pose.rotation
    xs, ys, zs = local[:, 0], local[:, 1], local[:, 2]
    section = (np.abs(ys) <= g.finger_depth / 2.0) & (zs <= 0.0) & (zs >= -g.finger_depth)
    corridor = section & (xs >= 0.0)
    if not corridor.any():
        return Rejection(REJECT_NO_CONTACT)
    span = float(xs[corridor].max())
    if span > g.max_opening:
        return Rejection(REJECT_NO_CONTACT)
    opening = min(span + OPENING_CLEARANCE, g.max_opening)

    skin = max(g.contact_skin, _PEN_EPS)
    in_left_finger = section & (xs < -skin) & (xs >= -g.finger_thickness)
    footprint = (np.abs(ys) <= g.finger_depth / 2.0) & (xs >= -g.finger_thickness) & (
        xs <= opening + g.finger_thickness
    )
    in_palm = footprint & (zs < -(g.finger_depth + g.palm_clearance))
    if in_left_finger.any() or in_palm.any():
        return Rejection(REJECT_PENETRATION)

    left_hi = min(g.finger_thickness, opening / 2.0)
    right_lo = max(opening - g.finger_thickness, opening / 2.0)
    left_idx = np.nonzero(corridor & (xs <= left_hi))[0]
    right_idx = np.nonzero(corridor & (xs >= right_lo) & (xs <= opening))[0]
    if left_idx.size == 0 or right_idx.size == 0:
        return Rejection(REJECT_NO_CONTACT)

    cache = _normal_cache if _normal_cache is not None else {}
    x_world = pose.rotation[:, 0]
    mean_l, left_idx, cos_l = _contact_alignment(cloud, left_idx, x_world, cache, patch_k, patch_radius)
    mean_r, right_idx, cos_r = _contact_alignment(cloud, right_idx, x_world, cache, patch_k, patch_radius)
    if left_idx.size == 0 or right_idx.size == 0:
        return Rejection(REJECT_NO_CONTACT)
    alignment = min(mean_l, mean_r)
    if alignment < g.mu_cos:
        return Rejection(REJECT_NOT_ANTIPODAL)
    contacts = (
        left_idx[cos_l >= g.mu_cos],
        right_idx[cos_r >= g.mu_cos],
    )
    return 1.0 - alignment, contacts


def best_grasp(
    cloud: PointCloud,
    region=None,
    cfg: SamplerConfig = SamplerConfig(),
    gripper: GripperModel = GripperModel(),
    viewpoint=None,
) -> GraspCandidate:
    """Search n_seeds x n_orientations candidates and keep the cheapest.

    The cloud is cropped to `region` first (pass None to search all of
    it); seed and contact indices refer to the cropped cloud. Ties
    resolve by (cost, seed point index, orientation index), so the
    result is identical no matter how the evaluation is ordered.
    Raises NoValidGrasp with a rejection histogram when nothing passes.
    """
    work = crop(cloud, region) if region is not None else cloud
    if len(work) == 0:
        raise EmptyCloud("no points to search (empty crop region?)")

    counts = {REJECT_PENETRATION: 0, REJECT_NO_CONTACT: 0, REJECT_NOT_ANTIPODAL: 0}
    degenerate = 0
    seeds: list[tuple[int, np.ndarray]] = []
    budget = 10 * cfg.n_seeds
    for draw in range(budget):
        if len(seeds) >= cfg.n_seeds:
            break
        rng = seed_rng(cfg.rng_seed, draw)
        try:
            idx, est = sample_seed(
                work, rng, patch_k=cfg.patch_k, patch_radius=cfg.patch_radius, viewpoint=viewpoint
            )
        except (DegeneratePatch, PatchTooSmall):
            degenerate += 1
            continue
        seeds.append((idx, est.normal))

    cache: dict = {}
    best: GraspCandidate | None = None
    best_key = None
    for idx, normal in seeds:
        for o_i, pose in enumerate(candidate_poses(work.points[idx], normal, cfg, gripper)):
            result = score_candidate(
                work, pose, gripper,
                patch_k=cfg.patch_k, patch_radius=cfg.patch_radius, _normal_cache=cache,
            )
            if isinstance(result, Rejection):
                counts[result.reason] += 1
                continue
            cost, contacts = result
            key = (cost, idx, o_i)
            if best_key is None or key < best_key:
                best_key = key
                best = GraspCandidate(
                    pose=pose, seed_index=idx, orientation_index=o_i,
                    cost=cost, contacts=contacts,
                )
    if best is None:
        raise NoValidGrasp(counts, degenerate_seeds=degenerate)
    return best

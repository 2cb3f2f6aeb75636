"""Synthetic point-cloud scenes with analytic grasp ground truth.

Each generator samples a surface uniformly by area, attaches exact
outward normals, optionally perturbs positions with isotropic Gaussian
noise, and rigidly transforms the result. The returned truth describes
the grasp the geometry admits by construction: a box is grasped across
its smallest dimension, a cylinder across any diameter perpendicular to
its axis, and a plane patch only states its normal. Generators are
deterministic per seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .camera import RigidPose
from .cloud import PointCloud


@dataclass
class GraspTruth:
    """Analytic grasp description; `axis` depends on the shape kind.

    box: `axis` is the expected closing direction (smallest dimension).
    cylinder: `axis` is the tube axis; valid grasps close perpendicular
    to it. plane: only `normal` is meaningful.
    """

    kind: str
    graspable: bool
    axis: np.ndarray | None = None   # unit vector, world frame
    width: float | None = None       # object extent across the grasp
    normal: np.ndarray | None = None # plane patches only


@dataclass
class SyntheticScene:
    cloud: PointCloud
    truth: GraspTruth
    params: dict = field(default_factory=dict)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) & 0xFFFFFFFFFFFFFFFF))


def _finish(points, normals, pose, noise_sigma, rng) -> tuple[np.ndarray, np.ndarray]:
    if noise_sigma > 0.0:
        points = points + rng.normal(0.0, noise_sigma, points.shape)
    pose = pose or RigidPose.identity()
    return pose.transform(points), normals @ pose.rotation.T


def gen_box_scene(
    w: float, d: float, h: float,
    pose: RigidPose | None = None,
    density: float = 2e5,
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> SyntheticScene:
    """Axis-aligned box of extents (w, d, h) sampled on all six faces."""
    if min(w, d, h) <= 0.0 or density <= 0.0:
        raise ValueError("box extents and density must be positive")
    rng = _rng(seed)
    ext = np.array([w, d, h])
    half = ext / 2.0
    pts, nrm = [], []
    for axis in range(3):
        u_axis, v_axis = (axis + 1) % 3, (axis + 2) % 3
        area = ext[u_axis] * ext[v_axis]
        count = int(round(density * area))
        for sign in (1.0, -1.0):
            uv = rng.uniform(-1.0, 1.0, (count, 2)) * [half[u_axis], half[v_axis]]
            face = np.zeros((count, 3))
            face[:, axis] = sign * half[axis]
            face[:, u_axis] = uv[:, 0]
            face[:, v_axis] = uv[:, 1]
            n = np.zeros((count, 3))
            n[:, axis] = sign
            pts.append(face)
            nrm.append(n)
    points = np.vstack(pts)
    normals = np.vstack(nrm)
    smallest = int(np.argmin(ext))
    pose = pose or RigidPose.identity()
    points, normals = _finish(points, normals, pose, noise_sigma, rng)
    truth = GraspTruth(
        kind="box",
        graspable=True,
        axis=pose.rotation[:, smallest].copy(),
        width=float(ext[smallest]),
    )
    return SyntheticScene(
        cloud=PointCloud(points, normals),
        truth=truth,
        params={"w": w, "d": d, "h": h, "density": density,
                "noise_sigma": noise_sigma, "seed": seed},
    )


def gen_cylinder_scene(
    radius: float, length: float,
    pose: RigidPose | None = None,
    density: float = 2e5,
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> SyntheticScene:
    """Open cylinder (lateral surface only), local axis z, centered."""
    if radius <= 0.0 or length <= 0.0 or density <= 0.0:
        raise ValueError("radius, length, and density must be positive")
    rng = _rng(seed)
    count = int(round(density * 2.0 * np.pi * radius * length))
    phi = rng.uniform(0.0, 2.0 * np.pi, count)
    z = rng.uniform(-length / 2.0, length / 2.0, count)
    normals = np.column_stack([np.cos(phi), np.sin(phi), np.zeros(count)])
    points = np.column_stack([radius * np.cos(phi), radius * np.sin(phi), z])
    pose = pose or RigidPose.identity()
    points, normals = _finish(points, normals, pose, noise_sigma, rng)
    truth = GraspTruth(
        kind="cylinder",
        graspable=True,
        axis=pose.rotation[:, 2].copy(),
        width=2.0 * radius,
    )
    return SyntheticScene(
        cloud=PointCloud(points, normals),
        truth=truth,
        params={"radius": radius, "length": length, "density": density,
                "noise_sigma": noise_sigma, "seed": seed},
    )


def gen_plane_patch(
    size_x: float, size_y: float,
    pose: RigidPose | None = None,
    density: float = 2e5,
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> SyntheticScene:
    """Rectangular patch of the local z = 0 plane."""
    if size_x <= 0.0 or size_y <= 0.0 or density <= 0.0:
        raise ValueError("patch sizes and density must be positive")
    rng = _rng(seed)
    count = int(round(density * size_x * size_y))
    xy = rng.uniform(-1.0, 1.0, (count, 2)) * [size_x / 2.0, size_y / 2.0]
    points = np.column_stack([xy, np.zeros(count)])
    normals = np.tile([0.0, 0.0, 1.0], (count, 1))
    pose = pose or RigidPose.identity()
    points, normals = _finish(points, normals, pose, noise_sigma, rng)
    truth = GraspTruth(kind="plane", graspable=False, normal=pose.rotation[:, 2].copy())
    return SyntheticScene(
        cloud=PointCloud(points, normals),
        truth=truth,
        params={"size_x": size_x, "size_y": size_y, "density": density,
                "noise_sigma": noise_sigma, "seed": seed},
    )


def gen_sphere_scene(
    radius: float,
    pose: RigidPose | None = None,
    density: float = 2e5,
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> SyntheticScene:
    """Full sphere surface; any diameter is a closing axis."""
    if radius <= 0.0 or density <= 0.0:
        raise ValueError("radius and density must be positive")
    rng = _rng(seed)
    count = int(round(density * 4.0 * np.pi * radius * radius))
    dirs = rng.normal(size=(count, 3))
    lens = np.linalg.norm(dirs, axis=1)
    lens[lens == 0.0] = 1.0
    normals = dirs / lens[:, None]
    points = radius * normals
    pose = pose or RigidPose.identity()
    points, normals = _finish(points, normals, pose, noise_sigma, rng)
    truth = GraspTruth(kind="sphere", graspable=True, width=2.0 * radius)
    return SyntheticScene(
        cloud=PointCloud(points, normals),
        truth=truth,
        params={"radius": radius, "density": density,
                "noise_sigma": noise_sigma, "seed": seed},
    )


def write_truth(path, truth: GraspTruth) -> None:
    """Plain-text sidecar describing the scene's analytic grasp."""
    lines = [f"kind {truth.kind}", f"graspable {int(truth.graspable)}"]
    if truth.axis is not None:
        lines.append("axis " + " ".join(f"{v:.9g}" for v in truth.axis))
    if truth.width is not None:
        lines.append(f"width {truth.width:.9g}")
    if truth.normal is not None:
        lines.append("normal " + " ".join(f"{v:.9g}" for v in truth.normal))
    Path(path).write_text("\n".join(lines) + "\n")

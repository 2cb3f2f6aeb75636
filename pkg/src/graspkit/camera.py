"""Pinhole back-projection and depth-banded cropping regions.

A pixel (u, v) at known camera depth zc back-projects to
Xc = (u - cx) * zc / fx, Yc = (v - cy) * zc / fy, Zc = zc. A convex
pixel polygon together with a depth band therefore defines a convex
frustum slice in the world frame; that slice is the keep-region used
to crop point clouds down to the part of the scene worth searching.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidPolygon, InvalidPose, NonPositiveDepth
from .rectangles import GraspRect8, signed_area


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self):
        if self.fx <= 0.0 or self.fy <= 0.0:
            raise ValueError(f"focal lengths must be positive, got fx={self.fx}, fy={self.fy}")


class RigidPose:
    """Rigid transform mapping camera-frame points into the world frame."""

    __slots__ = ("rotation", "translation")

    def __init__(self, rotation, translation):
        r = np.asarray(rotation, dtype=np.float64)
        t = np.asarray(translation, dtype=np.float64)
        if r.shape != (3, 3) or t.shape != (3,):
            raise InvalidPose(f"expected 3x3 rotation and 3-vector, got {r.shape} and {t.shape}")
        if not (np.isfinite(r).all() and np.isfinite(t).all()):
            raise InvalidPose("non-finite pose entries")
        if np.abs(r.T @ r - np.eye(3)).max() > 1e-9:
            raise InvalidPose("rotation is not orthonormal within 1e-9")
        if abs(np.linalg.det(r) - 1.0) > 1e-9:
            raise InvalidPose("rotation determinant is not +1 within 1e-9")
        r.flags.writeable = False
        t.flags.writeable = False
        self.rotation = r
        self.translation = t

    @classmethod
    def identity(cls) -> "RigidPose":
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_flat(cls, values) -> "RigidPose":
        """Build from 12 numbers: row-major rotation then translation."""
        v = np.asarray(values, dtype=np.float64).reshape(-1)
        if v.size != 12:
            raise InvalidPose(f"expected 12 numbers, got {v.size}")
        return cls(v[:9].reshape(3, 3), v[9:])

    def to_flat(self) -> np.ndarray:
        return np.concatenate([self.rotation.reshape(-1), self.translation])

    def transform(self, p) -> np.ndarray:
        """Apply to one point (3,) or a stack (n, 3)."""
        p = np.asarray(p, dtype=np.float64)
        return p @ self.rotation.T + self.translation

    def inverse_transform(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=np.float64)
        return (p - self.translation) @ self.rotation

    def compose(self, other: "RigidPose") -> "RigidPose":
        """self after other: result(p) = self(other(p))."""
        return RigidPose(self.rotation @ other.rotation,
                         self.rotation @ other.translation + self.translation)


@dataclass(frozen=True)
class ZBand:
    z_min: float
    z_max: float

    def __post_init__(self):
        if self.z_min <= 0.0:
            raise ValueError(f"z_min must be positive, got {self.z_min}")
        if self.z_min >= self.z_max:
            raise ValueError(f"need z_min < z_max, got [{self.z_min}, {self.z_max}]")


def backproject_pixel(u: float, v: float, zc: float, k: CameraIntrinsics) -> np.ndarray:
    """Lift a pixel to the camera frame at depth zc (> 0)."""
    if zc <= 0.0:
        raise NonPositiveDepth(f"depth must be positive, got {zc}")
    return np.array([(u - k.cx) * zc / k.fx, (v - k.cy) * zc / k.fy, zc])


def project_point(p, k: CameraIntrinsics) -> tuple[float, float]:
    """Forward pinhole map of a camera-frame point to pixel coordinates."""
    p = np.asarray(p, dtype=np.float64)
    if p[2] <= 0.0:
        raise NonPositiveDepth(f"point depth must be positive, got {p[2]}")
    return (k.fx * p[0] / p[2] + k.cx, k.fy * p[1] / p[2] + k.cy)


def camera_to_world(p, pose: RigidPose) -> np.ndarray:
    return pose.transform(p)


def world_to_camera(p, pose: RigidPose) -> np.ndarray:
    return pose.inverse_transform(p)


def _pixel_polygon(poly) -> np.ndarray:
    if isinstance(poly, GraspRect8):
        pts = poly.corners
    else:
        pts = np.asarray(poly, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise InvalidPolygon(f"expected an (n,2) pixel polygon, got shape {pts.shape}")
    if not np.isfinite(pts).all():
        raise InvalidPolygon("non-finite polygon vertex")
    if signed_area(pts) < 0.0:
        pts = pts[::-1].copy()
    e = np.roll(pts, -1, axis=0) - pts
    cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
    if (cross < -1e-9 * float(np.max(np.abs(e)) ** 2 + 1e-30)).any():
        raise InvalidPolygon("pixel polygon must be convex")
    return pts


class WorldRegion:
    """Convex prism between two depth planes of a pixel polygon.

    Membership is evaluated in the defining terms: a world point belongs
    to the region iff its camera-frame depth lies in the band and its
    pinhole projection falls inside the pixel polygon (boundaries
    inclusive). The prism corners at both depths are kept for reporting.
    """

    __slots__ = ("polygon_px", "intrinsics", "pose", "band", "near_corners", "far_corners")

    def __init__(self, polygon_px, intrinsics: CameraIntrinsics, pose: RigidPose, band: ZBand):
        self.polygon_px = _pixel_polygon(polygon_px)
        self.intrinsics = intrinsics
        self.pose = pose
        self.band = band
        near = [backproject_pixel(u, v, band.z_min, intrinsics) for u, v in self.polygon_px]
        far = [backproject_pixel(u, v, band.z_max, intrinsics) for u, v in self.polygon_px]
        self.near_corners = pose.transform(np.array(near))
        self.far_corners = pose.transform(np.array(far))

    def contains(self, points) -> np.ndarray:
        """Boolean membership mask for one point (3,) or a stack (n, 3)."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        cam = self.pose.inverse_transform(pts)
        z = cam[:, 2]
        ok = (z >= self.band.z_min) & (z <= self.band.z_max)
        k = self.intrinsics
        u = np.where(ok, k.fx * cam[:, 0] / np.where(ok, z, 1.0) + k.cx, 0.0)
        v = np.where(ok, k.fy * cam[:, 1] / np.where(ok, z, 1.0) + k.cy, 0.0)
        poly = self.polygon_px
        for i in range(len(poly)):
            ax, ay = poly[i]
            bx, by = poly[(i + 1) % len(poly)]
            cross = (bx - ax) * (v - ay) - (by - ay) * (u - ax)
            ok &= cross >= 0.0
        return ok if np.asarray(points).ndim > 1 else ok[0]


def project_polygon_region(
    poly_px, k: CameraIntrinsics, pose: RigidPose, band: ZBand
) -> WorldRegion:
    """Lift a convex pixel polygon plus depth band into a world keep-region."""
    return WorldRegion(poly_px, k, pose, band)

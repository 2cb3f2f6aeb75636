"""Oriented grasp rectangles and the rotated-rectangle overlap metric.

Two interchangeable forms are supported: a 5-number center/angle/size
record (GraspRect5) and the explicit 4-corner polygon (GraspRect8).
Angles are measured CCW from the image x-axis in radians and stored
normalized to [-pi/2, pi/2) because a grasp rectangle is invariant
under a half-turn.

Overlap is computed exactly with Sutherland-Hodgman convex clipping
followed by the shoelace formula; no rasterization is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePolygon, InvalidPolygon, NotARectangle

_DEGENERATE_AREA = 1e-12


def normalize_angle(theta: float) -> float:
    """Fold an angle into [-pi/2, pi/2) modulo pi."""
    t = math.fmod(theta + math.pi / 2.0, math.pi)
    if t < 0.0:
        t += math.pi
    return t - math.pi / 2.0


def angle_difference(a: float, b: float) -> float:
    """Absolute angular difference modulo pi, folded into [0, pi/2]."""
    d = math.fmod(abs(a - b), math.pi)
    if d > math.pi / 2.0:
        d = math.pi - d
    return d


@dataclass
class GraspRect5:
    """Grasp rectangle as (center x, center y, angle, width, height).

    x, y are image-plane pixel coordinates of the center, theta rotates
    CCW about it, w spans the gripper-opening axis and h the jaw axis.
    """

    x: float
    y: float
    theta: float
    w: float
    h: float

    def __post_init__(self):
        for name in ("x", "y", "theta", "w", "h"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise InvalidPolygon(f"non-finite field {name}")
            setattr(self, name, v)
        if self.w <= 0.0 or self.h <= 0.0:
            raise InvalidPolygon(f"non-positive extents w={self.w}, h={self.h}")
        self.theta = normalize_angle(self.theta)


class GraspRect8:
    """Grasp rectangle (or near-rectangular quad) as 4 CCW corners."""

    __slots__ = ("corners",)

    def __init__(self, corners):
        c = np.asarray(corners, dtype=np.float64)
        if c.shape != (4, 2):
            raise InvalidPolygon(f"expected 4 corner points, got shape {c.shape}")
        if not np.isfinite(c).all():
            raise InvalidPolygon("non-finite corner coordinate")
        if signed_area(c) < 0.0:
            c = c[[0, 3, 2, 1]]  # flip winding, keep the starting corner
        _check_convex(c)
        c.flags.writeable = False
        self.corners = c

    def __repr__(self):
        pts = ", ".join(f"({x:g},{y:g})" for x, y in self.corners)
        return f"GraspRect8([{pts}])"


def _check_convex(c: np.ndarray):
    # All consecutive edge cross products must share a sign (zeros allowed):
    # mixed signs mean a reflex vertex or a self-intersecting order.
    e = np.roll(c, -1, axis=0) - c
    cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
    scale = float(np.max(np.abs(e))) ** 2 + 1e-30
    if (cross < -1e-9 * scale).any() and (cross > 1e-9 * scale).any():
        raise InvalidPolygon("corners are not in convex order")


def signed_area(poly: np.ndarray) -> float:
    """Shoelace signed area; positive for CCW winding."""
    x = poly[:, 0]
    y = poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _as_poly(p) -> np.ndarray:
    if isinstance(p, GraspRect8):
        return p.corners
    a = np.asarray(p, dtype=np.float64)
    if a.ndim != 2 or a.shape[1] != 2 or a.shape[0] < 3:
        raise InvalidPolygon(f"expected an (n,2) polygon, got shape {a.shape}")
    return a


def rect5_to_corners(r: GraspRect5) -> GraspRect8:
    """Expand the 5-number form into its 4 CCW corners.

    Corner order starts at the (-w/2, -h/2) corner of the unrotated
    rectangle, so the first edge runs along the +width axis.
    """
    c, s = math.cos(r.theta), math.sin(r.theta)
    hw, hh = r.w / 2.0, r.h / 2.0
    local = np.array([[-hw, -hh], [hw, -hh], [hw, hh], [-hw, hh]])
    rot = np.array([[c, -s], [s, c]])
    return GraspRect8(local @ rot.T + [r.x, r.y])


def corners_to_rect5(c: GraspRect8, tol_rect: float = 1e-6) -> GraspRect5:
    """Recover the 5-number form from 4 corners.

    The corners must form a rectangle within `tol_rect` (relative to the
    longest edge): opposite sides equal and adjacent sides perpendicular.
    Raises NotARectangle otherwise; genuinely polygonal annotations should
    be scored with polygon overlap directly instead.
    """
    p = c.corners if isinstance(c, GraspRect8) else GraspRect8(c).corners
    e = np.roll(p, -1, axis=0) - p
    lengths = np.linalg.norm(e, axis=1)
    scale = float(lengths.max())
    if scale <= 0.0:
        raise NotARectangle("zero-size corner set")
    if abs(lengths[0] - lengths[2]) > tol_rect * scale or abs(lengths[1] - lengths[3]) > tol_rect * scale:
        raise NotARectangle(
            f"opposite sides differ: {lengths[0]:g} vs {lengths[2]:g}, {lengths[1]:g} vs {lengths[3]:g}"
        )
    if abs(float(e[0] @ e[1])) > tol_rect * scale * scale:
        raise NotARectangle("adjacent sides are not perpendicular")
    center = p.mean(axis=0)
    # Average the two width-direction edges to damp annotation jitter.
    wvec = (p[1] - p[0] + p[2] - p[3]) / 2.0
    hvec = (p[2] - p[1] + p[3] - p[0]) / 2.0
    return GraspRect5(
        x=float(center[0]),
        y=float(center[1]),
        theta=math.atan2(wvec[1], wvec[0]),
        w=float(np.linalg.norm(wvec)),
        h=float(np.linalg.norm(hvec)),
    )


def polygon_area(p) -> float:
    return abs(signed_area(_as_poly(p)))


def _clip_by_edge(subject: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Keep the part of `subject` on the left of directed edge a->b."""
    d = b - a
    out = []
    n = len(subject)
    cross = d[0] * (subject[:, 1] - a[1]) - d[1] * (subject[:, 0] - a[0])
    for i in range(n):
        j = (i + 1) % n
        ci, cj = cross[i], cross[j]
        if ci >= 0.0:
            out.append(subject[i])
            if cj < 0.0:
                t = ci / (ci - cj)
                out.append(subject[i] + t * (subject[j] - subject[i]))
        elif cj >= 0.0:
            t = ci / (ci - cj)
            out.append(subject[i] + t * (subject[j] - subject[i]))
    return np.array(out) if out else np.empty((0, 2))


def polygon_intersection_area(a, b) -> float:
    """Area of the intersection of two convex CCW polygons.

    Sutherland-Hodgman clipping of `a` against the half-planes of `b`,
    then shoelace. Symmetric in its arguments up to floating-point noise
    and clamped to [0, min(area(a), area(b))].
    """
    pa, pb = _as_poly(a), _as_poly(b)
    area_a, area_b = abs(signed_area(pa)), abs(signed_area(pb))
    if area_a < _DEGENERATE_AREA or area_b < _DEGENERATE_AREA:
        raise DegeneratePolygon(f"polygon area below {_DEGENERATE_AREA:g}")
    if signed_area(pa) < 0.0:
        pa = pa[::-1]
    if signed_area(pb) < 0.0:
        pb = pb[::-1]
    clipped = pa
    for i in range(len(pb)):
        if len(clipped) < 3:
            return 0.0
        clipped = _clip_by_edge(clipped, pb[i], pb[(i + 1) % len(pb)])
    if len(clipped) < 3:
        return 0.0
    inter = abs(signed_area(clipped))
    return max(0.0, min(inter, area_a, area_b))


def jaccard(u, v) -> float:
    """Intersection-over-union of two convex polygons, in [0, 1]."""
    pu, pv = _as_poly(u), _as_poly(v)
    inter = polygon_intersection_area(pu, pv)
    union = abs(signed_area(pu)) + abs(signed_area(pv)) - inter
    return inter / union

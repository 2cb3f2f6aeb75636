"""Point-cloud container, neighbor queries, and surface-normal estimation.

The normal at a point is the eigenvector for the smallest eigenvalue of
the patch scatter matrix W = sum_i (p_i - p*)(p_i - p*)^T, i.e. the unit
direction minimizing n^T W n. The 3x3 symmetric eigenproblem is solved
in closed form (trigonometric characteristic roots + cross-product null
vector) for speed and determinism; tests validate it against a full
eigendecomposition.

Nearest-neighbor queries run on a uniform voxel grid but are exact: the
grid only bounds which points need distance checks, and results carry a
deterministic (distance, index) tie-break identical to a full scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePatch, EmptyCloud, KTooLarge, PatchTooSmall

_NORMAL_UNIT_TOL = 1e-6
_DEGENERACY_RATIO = 1e-9


class PointCloud:
    """Immutable set of 3-D points with optional unit normals."""

    __slots__ = ("points", "normals", "_grid")

    def __init__(self, points, normals=None):
        p = np.asarray(points, dtype=np.float64)
        if p.ndim != 2 or p.shape[1] != 3:
            raise ValueError(f"expected (n,3) points, got shape {p.shape}")
        if not np.isfinite(p).all():
            raise ValueError("non-finite point coordinate")
        p = p.copy()
        p.flags.writeable = False
        self.points = p
        if normals is not None:
            n = np.asarray(normals, dtype=np.float64)
            if n.shape != p.shape:
                raise ValueError(f"normals shape {n.shape} does not match points {p.shape}")
            lens = np.linalg.norm(n, axis=1)
            if p.shape[0] and np.abs(lens - 1.0).max() > _NORMAL_UNIT_TOL:
                raise ValueError("normals must be unit length within 1e-6")
            n = n.copy()
            n.flags.writeable = False
            self.normals = n
        else:
            self.normals = None
        self._grid = None

    def __len__(self):
        return self.points.shape[0]

    def grid(self) -> "VoxelGrid":
        if self._grid is None:
            self._grid = VoxelGrid(self.points)
        return self._grid


class VoxelGrid:
    """Uniform hash grid over a fixed point set, used to bound knn scans."""

    def __init__(self, points: np.ndarray, cell_size: float | None = None):
        self.points = points
        n = points.shape[0]
        if n == 0:
            self.cell = 1.0
            self.origin = np.zeros(3)
            self.cells = np.empty((0, 3), dtype=np.int64)
            self.members = []
            return
        lo = points.min(axis=0)
        hi = points.max(axis=0)
        extent = float((hi - lo).max())
        if cell_size is None:
            divisions = min(128, max(4, int(round(n ** (1.0 / 3.0)))))
            cell_size = extent / divisions if extent > 0.0 else 1.0
        self.cell = max(cell_size, 1e-12)
        self.origin = lo
        ids = np.floor((points - lo) / self.cell).astype(np.int64)
        self.cells, inverse = np.unique(ids, axis=0, return_inverse=True)
        order = np.argsort(inverse, kind="stable")
        bounds = np.searchsorted(inverse[order], np.arange(len(self.cells) + 1))
        self.members = [order[bounds[i]:bounds[i + 1]] for i in range(len(self.cells))]

    def knn(self, query: np.ndarray, k: int) -> np.ndarray:
        """Indices of the k nearest points; ties break to the lower index."""
        q = np.asarray(query, dtype=np.float64)
        qcell = np.floor((q - self.origin) / self.cell).astype(np.int64)
        cheb = np.abs(self.cells - qcell).max(axis=1)
        ring_order = np.argsort(cheb, kind="stable")
        rings = cheb[ring_order]
        gathered: list[np.ndarray] = []
        total = 0
        pos = 0
        ring = 0
        kth = math.inf
        while pos < len(ring_order):
            take = pos
            while take < len(ring_order) and rings[take] == rings[pos]:
                take += 1
            ring = int(rings[pos])
            for ci in ring_order[pos:take]:
                gathered.append(self.members[ci])
            total += sum(len(self.members[ci]) for ci in ring_order[pos:take])
            pos = take
            if total >= k:
                idx = np.concatenate(gathered)
                d2 = np.einsum("ij,ij->i", self.points[idx] - q, self.points[idx] - q)
                kth = np.partition(d2, k - 1)[k - 1]
                # Any unscanned point is at least ring*cell away from the query;
                # require strict clearance before trusting the current top-k.
                bound = ring * self.cell
                if kth < bound * bound * (1.0 - 1e-12):
                    order = np.lexsort((idx, d2))
                    return idx[order[:k]]
        idx = np.concatenate(gathered) if gathered else np.empty(0, dtype=np.int64)
        d2 = np.einsum("ij,ij->i", self.points[idx] - q, self.points[idx] - q)
        order = np.lexsort((idx, d2))
        return idx[order[:k]]


def crop(cloud: PointCloud, region) -> PointCloud:
    """Keep exactly the points inside `region`, preserving order."""
    if len(cloud) == 0:
        return cloud
    mask = region.contains(cloud.points)
    normals = cloud.normals[mask] if cloud.normals is not None else None
    return PointCloud(cloud.points[mask], normals)


def knn(cloud: PointCloud, query, k: int) -> np.ndarray:
    """Exact k-nearest-neighbor indices by Euclidean distance."""
    n = len(cloud)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > n:
        raise KTooLarge(f"k={k} exceeds cloud size {n}")
    q = np.asarray(query, dtype=np.float64)
    if n <= 256:
        d2 = np.einsum("ij,ij->i", cloud.points - q, cloud.points - q)
        order = np.lexsort((np.arange(n), d2))
        return order[:k]
    return cloud.grid().knn(q, k)


@dataclass(frozen=True)
class PatchStats:
    """Centroid, scatter matrix, and size of a point patch."""

    centroid: np.ndarray
    scatter: np.ndarray
    count: int


@dataclass(frozen=True)
class NormalEstimate:
    normal: np.ndarray
    planarity: float  # smallest / middle eigenvalue ratio, 0 for a perfect plane


def patch_stats(cloud: PointCloud, indices) -> PatchStats:
    """Mean and centered scatter (sum of outer products) of a patch."""
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size < 3:
        raise PatchTooSmall(f"patch needs >= 3 points, got {idx.size}")
    pts = cloud.points[idx]
    centroid = pts.mean(axis=0)
    centered = pts - centroid
    scatter = centered.T @ centered
    scatter = (scatter + scatter.T) / 2.0
    return PatchStats(centroid=centroid, scatter=scatter, count=int(idx.size))


def _eigenvalues_sym3(w: np.ndarray) -> tuple[float, float, float]:
    """Ascending eigenvalues of a symmetric 3x3 matrix, closed form."""
    tr = w[0, 0] + w[1, 1] + w[2, 2]
    q = tr / 3.0
    b = w - q * np.eye(3)
    p2 = float((b * b).sum())
    if p2 <= 0.0:
        return q, q, q
    p = math.sqrt(p2 / 6.0)
    r = float(np.linalg.det(b / p)) / 2.0
    r = min(1.0, max(-1.0, r))
    phi = math.acos(r) / 3.0
    hi = q + 2.0 * p * math.cos(phi)
    lo = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    mid = 3.0 * q - hi - lo
    return lo, mid, hi


def estimate_normal(stats: PatchStats, viewpoint=None) -> NormalEstimate:
    """Direction minimizing n^T W n over unit vectors.

    The sign is canonicalized so the normal points toward `viewpoint`
    (the camera origin by default); when the patch centroid sees the
    viewpoint edge-on the component of largest magnitude is made
    positive instead. Raises DegeneratePatch when the two smallest
    eigenvalues coincide within 1e-9 * trace, because the minimizing
    direction is then not unique.
    """
    w = stats.scatter
    trace = float(np.trace(w))
    if trace <= 0.0:
        raise DegeneratePatch("zero scatter: all patch points coincide")
    lo, mid, _ = _eigenvalues_sym3(w)
    if mid - lo <= _DEGENERACY_RATIO * trace:
        raise DegeneratePatch(
            f"smallest eigenvalues coincide ({lo:.3e} vs {mid:.3e}, trace {trace:.3e})"
        )
    m = w - lo * np.eye(3)
    cands = np.array([
        np.cross(m[0], m[1]),
        np.cross(m[0], m[2]),
        np.cross(m[1], m[2]),
    ])
    norms = np.linalg.norm(cands, axis=1)
    best = int(np.argmax(norms))
    if norms[best] <= 0.0:
        raise DegeneratePatch("null-space direction could not be isolated")
    normal = cands[best] / norms[best]

    vp = np.zeros(3) if viewpoint is None else np.asarray(viewpoint, dtype=np.float64)
    toward = vp - stats.centroid
    d = float(normal @ toward)
    if d < 0.0:
        normal = -normal
    elif d == 0.0:
        lead = int(np.argmax(np.abs(normal)))
        if normal[lead] < 0.0:
            normal = -normal

    lo_c = max(lo, 0.0)
    if lo_c <= 1e-12 * trace:
        lo_c = 0.0  # below fp resolution: report a perfect plane as exactly 0
    planarity = lo_c / mid if mid > 0.0 else 0.0
    return NormalEstimate(normal=normal, planarity=min(planarity, 1.0))


def patch_normal(
    cloud: PointCloud,
    index: int,
    k: int = 30,
    radius: float | None = None,
    viewpoint=None,
) -> NormalEstimate:
    """Estimate the surface normal at one cloud point from its knn patch."""
    if len(cloud) == 0:
        raise EmptyCloud("cannot estimate a normal on an empty cloud")
    k = min(k, len(cloud))
    idx = knn(cloud, cloud.points[index], k)
    if radius is not None and radius > 0.0:
        d = np.linalg.norm(cloud.points[idx] - cloud.points[index], axis=1)
        idx = idx[d <= radius]
    if idx.size < 3:
        raise DegeneratePatch(f"only {idx.size} point(s) within the patch radius")
    return estimate_normal(patch_stats(cloud, idx), viewpoint=viewpoint)

"""Dataset-level grasp-correctness evaluation.

A predicted rectangle counts as correct when some ground-truth positive
overlaps it with IoU at or above the configured threshold and (unless
disabled) the orientations agree within the angle gate. Every label is
consulted; the best-overlapping one is reported.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import EmptyTruthSet, MissingAnnotation
from .rectangles import GraspRect5, angle_difference, jaccard, rect5_to_corners

DEFAULT_JACCARD_THRESHOLD = 0.25
DEFAULT_ANGLE_THRESHOLD = 3.141592653589793 / 6.0  # 30 degrees


@dataclass(frozen=True)
class EvalConfig:
    jaccard_threshold: float = DEFAULT_JACCARD_THRESHOLD
    angle_threshold: float = DEFAULT_ANGLE_THRESHOLD
    angle_check_enabled: bool = True

    def __post_init__(self):
        if not (0.0 < self.jaccard_threshold <= 1.0):
            raise ValueError(f"jaccard_threshold must be in (0, 1], got {self.jaccard_threshold}")
        if not (0.0 < self.angle_threshold <= 3.141592653589793 / 2.0):
            raise ValueError(f"angle_threshold must be in (0, pi/2], got {self.angle_threshold}")


@dataclass
class ImageResult:
    image_id: str
    prediction: GraspRect5
    best_truth: GraspRect5 | None
    best_iou: float
    matched: bool


@dataclass
class EvalReport:
    n_images: int
    n_correct: int
    accuracy: float
    per_image: list[ImageResult] = field(default_factory=list)


def is_correct_grasp(
    pred: GraspRect5, truths: list[GraspRect5], cfg: EvalConfig = EvalConfig()
) -> tuple[bool, float, int | None]:
    """Check one prediction against all ground-truth rectangles.

    Returns (matched, best_iou, best_index). The reported rectangle is
    the highest-IoU one among those passing the angle gate, falling back
    to the overall best when none pass; equal IoU resolves to the lowest
    index so reports are deterministic.
    """
    if not truths:
        raise EmptyTruthSet("prediction checked against an empty truth list")
    pred_poly = rect5_to_corners(pred)
    ious = []
    gates = []
    for t in truths:
        ious.append(jaccard(pred_poly, rect5_to_corners(t)))
        if cfg.angle_check_enabled:
            gates.append(angle_difference(pred.theta, t.theta) <= cfg.angle_threshold)
        else:
            gates.append(True)
    gated = [i for i, g in enumerate(gates) if g]
    pool = gated if gated else range(len(truths))
    best = max(pool, key=lambda i: (ious[i], -i))
    matched = bool(gated) and ious[best] >= cfg.jaccard_threshold
    return matched, ious[best], best


def _worker_count() -> int:
    raw = os.environ.get("GRASPKIT_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = min(8, os.cpu_count() or 1)
    return n


def evaluate_dataset(
    preds: dict[str, GraspRect5],
    annotations: dict[str, list[GraspRect5]],
    cfg: EvalConfig = EvalConfig(),
    max_workers: int | None = None,
) -> EvalReport:
    """Score every predicted image and aggregate accuracy.

    Images may be scored in parallel (GRASPKIT_THREADS caps the pool);
    the report is sorted by image id so output is identical either way.
    An image whose annotation list is empty is recorded as unmatched.
    """
    for image_id in preds:
        if image_id not in annotations:
            raise MissingAnnotation(image_id)
    ids = sorted(preds)

    def score(image_id: str) -> ImageResult:
        pred = preds[image_id]
        truths = annotations[image_id]
        if not truths:
            return ImageResult(image_id, pred, None, 0.0, False)
        matched, best_iou, best = is_correct_grasp(pred, truths, cfg)
        return ImageResult(image_id, pred, truths[best], best_iou, matched)

    workers = max_workers if max_workers is not None else _worker_count()
    if workers > 1 and len(ids) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(score, ids))
    else:
        results = [score(i) for i in ids]

    n_correct = sum(r.matched for r in results)
    n_images = len(results)
    accuracy = n_correct / n_images if n_images else 0.0
    return EvalReport(n_images=n_images, n_correct=n_correct, accuracy=accuracy, per_image=results)

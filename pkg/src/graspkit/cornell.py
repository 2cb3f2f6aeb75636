"""Parsing of corner-format grasp annotation files.

Annotation files are plain text, one "x y" pair per line, four
consecutive lines per rectangle. Rectangles containing any NaN line (a
known quirk of the public dataset) are dropped and counted rather than
treated as fatal; zero-area rectangles are rejected loudly because they
indicate corruption. Files pair as pcdNNNNcpos.txt / pcdNNNNcneg.txt
per image id NNNN.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DanglingCorners, DegeneratePolygon, MalformedLine
from .rectangles import GraspRect8, signed_area

_ID_RE = re.compile(r"(\d+)")


@dataclass
class AnnotationSet:
    image_id: str
    positives: list[GraspRect8] = field(default_factory=list)
    negatives: list[GraspRect8] = field(default_factory=list)
    dropped_positives: int = 0
    dropped_negatives: int = 0


def _parse_corner_lines(text: str) -> tuple[list[GraspRect8], int]:
    """Group corner lines four at a time; returns (rects, dropped count)."""
    corners = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise MalformedLine(lineno, f"expected two numbers, got {len(parts)} token(s)")
        try:
            x, y = float(parts[0]), float(parts[1])
        except ValueError:
            raise MalformedLine(lineno, f"unparseable coordinates {line!r}") from None
        corners.append((lineno, x, y))
    if len(corners) % 4:
        raise DanglingCorners(len(corners) % 4)

    rects = []
    dropped = 0
    for i in range(0, len(corners), 4):
        quad = corners[i:i + 4]
        pts = [(x, y) for _, x, y in quad]
        if any(math.isnan(x) or math.isnan(y) for x, y in pts):
            dropped += 1
            continue
        rect = GraspRect8(pts)
        if abs(signed_area(rect.corners)) < 1e-12:
            raise DegeneratePolygon(
                f"zero-area rectangle starting at line {quad[0][0]}"
            )
        rects.append(rect)
    return rects, dropped


def parse_cornell_annotations(pos_text: str, neg_text: str = "", image_id: str = "") -> AnnotationSet:
    """Parse positive and negative annotation file contents for one image."""
    positives, dropped_pos = _parse_corner_lines(pos_text)
    negatives, dropped_neg = _parse_corner_lines(neg_text) if neg_text else ([], 0)
    return AnnotationSet(
        image_id=image_id,
        positives=positives,
        negatives=negatives,
        dropped_positives=dropped_pos,
        dropped_negatives=dropped_neg,
    )


def image_id_from_name(name: str) -> str | None:
    m = _ID_RE.search(Path(name).name)
    return m.group(1) if m else None


def scan_annotation_dir(path) -> dict[str, AnnotationSet]:
    """Load every pcd*cpos.txt (plus optional cneg sibling) in a directory."""
    root = Path(path)
    out: dict[str, AnnotationSet] = {}
    for pos_file in sorted(root.glob("*cpos.txt")):
        image_id = image_id_from_name(pos_file.name)
        if image_id is None:
            continue
        neg_file = pos_file.with_name(pos_file.name.replace("cpos", "cneg"))
        neg_text = neg_file.read_text() if neg_file.exists() else ""
        out[image_id] = parse_cornell_annotations(
            pos_file.read_text(), neg_text, image_id=image_id
        )
    return out


def load_prediction_file(path) -> GraspRect8:
    """Read a corner-format prediction file; the first valid rectangle wins."""
    rects, _ = _parse_corner_lines(Path(path).read_text())
    if not rects:
        raise MalformedLine(0, f"no usable rectangle in {path}")
    return rects[0]


def scan_prediction_dir(path) -> dict[str, GraspRect8]:
    """Map image id -> predicted rectangle for every .txt file present."""
    root = Path(path)
    out: dict[str, GraspRect8] = {}
    for f in sorted(root.glob("*.txt")):
        image_id = image_id_from_name(f.name)
        if image_id is None:
            continue
        out[image_id] = load_prediction_file(f)
    return out

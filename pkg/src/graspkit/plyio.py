"""ASCII PLY reader/writer for the supported point-cloud subset.

The subset is a single `element vertex N` with float properties x y z
and optionally nx ny nz; any other vertex properties are parsed past
and dropped. Values are printed with 9 significant digits, which
round-trips comfortably inside 1e-7.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .cloud import PointCloud
from .errors import BadHeader, CountMismatch, MalformedLine

_FLOAT_TYPES = {"float", "float32", "float64", "double"}


def read_ply(path) -> PointCloud:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != "ply":
        raise BadHeader("file does not start with 'ply'")
    n_vertices = None
    properties: list[str] = []
    body_start = None
    saw_format = False
    for i, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("comment"):
            continue
        if line == "end_header":
            body_start = i
            break
        parts = line.split()
        if parts[0] == "format":
            if parts[1:] != ["ascii", "1.0"]:
                raise BadHeader(f"unsupported format {line!r}")
            saw_format = True
        elif parts[0] == "element":
            if n_vertices is not None or len(parts) != 3 or parts[1] != "vertex":
                raise BadHeader(f"only a single vertex element is supported, got {line!r}")
            try:
                n_vertices = int(parts[2])
            except ValueError:
                raise BadHeader(f"bad vertex count in {line!r}") from None
        elif parts[0] == "property":
            if n_vertices is None:
                raise BadHeader("property declared before the vertex element")
            if len(parts) != 3 or parts[1] not in _FLOAT_TYPES:
                raise BadHeader(f"unsupported property {line!r}")
            properties.append(parts[2])
        else:
            raise BadHeader(f"unrecognized header line {line!r}")
    if body_start is None:
        raise BadHeader("missing end_header")
    if not saw_format or n_vertices is None:
        raise BadHeader("header lacks format or vertex element")
    for axis in ("x", "y", "z"):
        if axis not in properties:
            raise BadHeader(f"vertex element lacks property {axis}")

    rows = []
    for lineno, raw in enumerate(lines[body_start:], start=body_start + 1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != len(properties):
            raise MalformedLine(lineno, f"expected {len(properties)} values, got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise MalformedLine(lineno, f"unparseable value in {line!r}") from None
    if len(rows) != n_vertices:
        raise CountMismatch(f"header declares {n_vertices} vertices, body has {len(rows)}")

    data = np.array(rows, dtype=np.float64) if rows else np.empty((0, len(properties)))
    cols = {name: j for j, name in enumerate(properties)}
    points = data[:, [cols["x"], cols["y"], cols["z"]]]
    normals = None
    if all(n in cols for n in ("nx", "ny", "nz")):
        normals = data[:, [cols["nx"], cols["ny"], cols["nz"]]]
    return PointCloud(points, normals)


def write_ply(path, cloud: PointCloud) -> None:
    with_normals = cloud.normals is not None
    header = ["ply", "format ascii 1.0", f"element vertex {len(cloud)}",
              "property float x", "property float y", "property float z"]
    if with_normals:
        header += ["property float nx", "property float ny", "property float nz"]
    header.append("end_header")
    out = ["\n".join(header)]
    for i in range(len(cloud)):
        vals = list(cloud.points[i])
        if with_normals:
            vals += list(cloud.normals[i])
        out.append(" ".join(f"{v:.9g}" for v in vals))
    Path(path).write_text("\n".join(out) + "\n")

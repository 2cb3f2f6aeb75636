"""Binary container for the attention/regression weights.

Layout (little-endian):
  magic "FVTW" (4 bytes), version u32 = 1, tensor count u32, then per
  tensor: name length u16, UTF-8 name, ndim u8, each dim u32, raw
  float32 payload. Tensors are written in a fixed canonical order so a
  save/load/save cycle is byte-identical.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import (
    BadMagic,
    MissingTensor,
    ShapeMismatch,
    VersionUnsupported,
    WeightFormatError,
)
from .hilo import (
    HeadWeights,
    HiLoConfig,
    validate_attention_shapes,
    validate_regression_shapes,
)

MAGIC = b"FVTW"
VERSION = 1

# Canonical (container name, HeadWeights field) pairs, in file order.
TENSOR_FIELDS = (
    ("hi.q", "hi_q"),
    ("hi.k", "hi_k"),
    ("hi.v", "hi_v"),
    ("lo.q", "lo_q"),
    ("lo.k", "lo_k"),
    ("lo.v", "lo_v"),
    ("attn.out", "attn_out"),
    ("fc1.weight", "fc1_weight"),
    ("fc1.bias", "fc1_bias"),
    ("fc2.weight", "fc2_weight"),
    ("fc2.bias", "fc2_bias"),
    ("fc3.weight", "fc3_weight"),
    ("fc3.bias", "fc3_bias"),
)
_NAME_TO_FIELD = dict(TENSOR_FIELDS)


def save_weights(path, weights: HeadWeights) -> None:
    """Write all tensors in canonical order."""
    chunks = [MAGIC, struct.pack("<II", VERSION, len(TENSOR_FIELDS))]
    for name, field in TENSOR_FIELDS:
        t = np.ascontiguousarray(getattr(weights, field), dtype="<f4")
        encoded = name.encode("utf-8")
        chunks.append(struct.pack("<H", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<B", t.ndim))
        chunks.append(struct.pack(f"<{t.ndim}I", *t.shape) if t.ndim else b"")
        chunks.append(t.tobytes())
    Path(path).write_bytes(b"".join(chunks))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise WeightFormatError(
                f"container truncated at byte {self.pos} (needed {n} more)"
            )
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def load_weights(
    path,
    cfg: HiLoConfig | None = None,
    out_dim: int | None = None,
) -> HeadWeights:
    """Decode a container, checking presence and shapes of every tensor.

    Regression shapes are always enforced; attention shapes are checked
    against `cfg` when given (structural 2-D checks otherwise). Pass
    `out_dim` to additionally pin the final layer width.
    """
    data = Path(path).read_bytes()
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagic(f"not a weight container: {path}")
    r = _Reader(data)
    r.take(4)
    version, count = r.unpack("<II")
    if version != VERSION:
        raise VersionUnsupported(f"container version {version}, supported: {VERSION}")

    tensors: dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = r.unpack("<H")
        try:
            name = r.take(name_len).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise WeightFormatError(f"undecodable tensor name at byte {r.pos}") from exc
        (ndim,) = r.unpack("<B")
        dims = r.unpack(f"<{ndim}I") if ndim else ()
        n_values = int(np.prod(dims, dtype=np.int64)) if ndim else 1
        payload = r.take(4 * n_values)
        if name in tensors:
            raise WeightFormatError(f"duplicate tensor {name!r}")
        if name not in _NAME_TO_FIELD:
            raise WeightFormatError(f"unexpected tensor {name!r}")
        t = np.frombuffer(payload, dtype="<f4").reshape(dims)
        if not np.isfinite(t).all():
            raise WeightFormatError(f"tensor {name!r} contains non-finite values")
        tensors[name] = t
    if r.pos != len(data):
        raise WeightFormatError(f"{len(data) - r.pos} trailing byte(s) after tensors")

    for name, _ in TENSOR_FIELDS:
        if name not in tensors:
            raise MissingTensor(name)

    weights = HeadWeights(**{field: tensors[name] for name, field in TENSOR_FIELDS})
    validate_regression_shapes(weights)
    if out_dim is not None and weights.out_dim != out_dim:
        raise ShapeMismatch(
            f"fc3.weight: container provides {weights.out_dim} outputs, expected {out_dim}"
        )
    if cfg is not None:
        validate_attention_shapes(weights, cfg)
    else:
        for name in ("hi.q", "hi.k", "hi.v", "lo.q", "lo.k", "lo.v", "attn.out"):
            if tensors[name].ndim != 2:
                raise ShapeMismatch(f"{name}: expected a 2-D tensor, got {tensors[name].ndim}-D")
        c = tensors["attn.out"].shape[0]
        if tensors["attn.out"].shape != (c, c):
            raise ShapeMismatch(f"attn.out: expected square, got {tensors['attn.out'].shape}")
        for name in ("hi.q", "hi.k", "hi.v", "lo.q", "lo.k", "lo.v"):
            if tensors[name].shape[0] != c:
                raise ShapeMismatch(
                    f"{name}: first dim {tensors[name].shape[0]} does not match channels {c}"
                )
        if tensors["hi.q"].shape[1] + tensors["lo.q"].shape[1] != c:
            raise ShapeMismatch("hi.q and lo.q widths must sum to the channel count")
    return weights

"""Split-frequency windowed attention block and the grasp regression head.

The attention heads are divided into two groups. High-frequency heads
run scaled dot-product self-attention inside non-overlapping s x s token
windows. Low-frequency heads average-pool each window to a single token
and let every token attend to the pooled set. Head outputs are
concatenated channel-wise and mixed by one output projection.

The regression head is three fully connected layers
(768 -> 2048 -> 1024 -> 5 or 8) with leaky-ReLU (slope 0.1) after the
first two; the dropout slots that sit between the layers during
training are identity at inference and are not modeled. All arithmetic
is single precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch, WindowIndivisible

FEATURE_DIM = 768
HIDDEN1 = 2048
HIDDEN2 = 1024
OUTPUT_DIMS = (5, 8)
LEAKY_SLOPE = 0.1


@dataclass(frozen=True)
class HiLoConfig:
    dim: int
    n_heads: int
    alpha: float
    window: int

    def __post_init__(self):
        if self.n_heads < 1 or self.dim < 1:
            raise ValueError("dim and n_heads must be >= 1")
        if self.dim % self.n_heads:
            raise ValueError(f"dim {self.dim} not divisible by n_heads {self.n_heads}")
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")

    @property
    def head_dim(self) -> int:
        return self.dim // self.n_heads

    @property
    def low_heads(self) -> int:
        return int(math.floor(self.alpha * self.n_heads))

    @property
    def high_heads(self) -> int:
        return self.n_heads - self.low_heads


@dataclass
class HeadWeights:
    """All tensors of the attention block and regression head (float32)."""

    hi_q: np.ndarray
    hi_k: np.ndarray
    hi_v: np.ndarray
    lo_q: np.ndarray
    lo_k: np.ndarray
    lo_v: np.ndarray
    attn_out: np.ndarray
    fc1_weight: np.ndarray
    fc1_bias: np.ndarray
    fc2_weight: np.ndarray
    fc2_bias: np.ndarray
    fc3_weight: np.ndarray
    fc3_bias: np.ndarray

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            t = np.ascontiguousarray(np.asarray(getattr(self, name)), dtype=np.float32)
            if not np.isfinite(t).all():
                raise ShapeMismatch(f"{name} contains non-finite values")
            setattr(self, name, t)

    @property
    def out_dim(self) -> int:
        return int(self.fc3_weight.shape[1])


def validate_regression_shapes(w: HeadWeights):
    expected = {
        "fc1_weight": (FEATURE_DIM, HIDDEN1),
        "fc1_bias": (HIDDEN1,),
        "fc2_weight": (HIDDEN1, HIDDEN2),
        "fc2_bias": (HIDDEN2,),
    }
    for name, shape in expected.items():
        if getattr(w, name).shape != shape:
            raise ShapeMismatch(f"{name}: expected {shape}, got {getattr(w, name).shape}")
    if w.fc3_weight.ndim != 2 or w.fc3_weight.shape[0] != HIDDEN2 or w.fc3_weight.shape[1] not in OUTPUT_DIMS:
        raise ShapeMismatch(
            f"fc3_weight: expected ({HIDDEN2}, 5|8), got {w.fc3_weight.shape}"
        )
    if w.fc3_bias.shape != (w.fc3_weight.shape[1],):
        raise ShapeMismatch(f"fc3_bias: expected ({w.fc3_weight.shape[1]},), got {w.fc3_bias.shape}")


def validate_attention_shapes(w: HeadWeights, cfg: HiLoConfig):
    hd = cfg.head_dim
    expected = {
        "hi_q": (cfg.dim, cfg.high_heads * hd),
        "hi_k": (cfg.dim, cfg.high_heads * hd),
        "hi_v": (cfg.dim, cfg.high_heads * hd),
        "lo_q": (cfg.dim, cfg.low_heads * hd),
        "lo_k": (cfg.dim, cfg.low_heads * hd),
        "lo_v": (cfg.dim, cfg.low_heads * hd),
        "attn_out": (cfg.dim, cfg.dim),
    }
    for name, shape in expected.items():
        if getattr(w, name).shape != shape:
            raise ShapeMismatch(f"{name}: expected {shape}, got {getattr(w, name).shape}")


def leaky_relu(x: np.ndarray, slope: float = LEAKY_SLOPE) -> np.ndarray:
    x = np.asarray(x)
    return np.where(x >= 0, x, np.asarray(slope, dtype=x.dtype) * x)


def _softmax_rows(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def hilo_forward(x, cfg: HiLoConfig, w: HeadWeights, return_attn: bool = False):
    """Forward pass of the split-frequency attention block.

    x has shape (H, W, C) with H and W divisible by the window side.
    Returns (H, W, C); with return_attn=True also returns the high- and
    low-branch attention tensors for inspection.
    """
    x = np.ascontiguousarray(np.asarray(x), dtype=np.float32)
    if x.ndim != 3:
        raise ShapeMismatch(f"expected (H, W, C) input, got shape {x.shape}")
    h, wd, c = x.shape
    if c != cfg.dim:
        raise ShapeMismatch(f"input channels {c} do not match config dim {cfg.dim}")
    s = cfg.window
    if h % s or wd % s:
        raise WindowIndivisible(f"map {h}x{wd} not divisible by window {s}")
    validate_attention_shapes(w, cfg)

    hd = cfg.head_dim
    scale = np.float32(1.0 / math.sqrt(hd))
    nh, nw = h // s, wd // s
    n_win = nh * nw
    tokens_per_window = s * s
    # (n_win, s*s, C) with window-major ordering
    xw = x.reshape(nh, s, nw, s, c).transpose(0, 2, 1, 3, 4).reshape(n_win, tokens_per_window, c)

    parts = []
    hi_attn = None
    lo_attn = None

    if cfg.high_heads:
        def split(m):  # (n_win, t, Hh*hd) -> (n_win, Hh, t, hd)
            return m.reshape(n_win, tokens_per_window, cfg.high_heads, hd).transpose(0, 2, 1, 3)

        q = split(xw @ w.hi_q)
        k = split(xw @ w.hi_k)
        v = split(xw @ w.hi_v)
        hi_attn = _softmax_rows((q @ k.transpose(0, 1, 3, 2)) * scale)
        out = hi_attn @ v  # (n_win, Hh, t, hd)
        out = out.transpose(0, 2, 1, 3).reshape(n_win, tokens_per_window, cfg.high_heads * hd)
        out = out.reshape(nh, nw, s, s, -1).transpose(0, 2, 1, 3, 4).reshape(h, wd, -1)
        parts.append(out)

    if cfg.low_heads:
        pooled = xw.mean(axis=1)  # (n_win, C)
        lq = (x.reshape(h * wd, c) @ w.lo_q).reshape(h * wd, cfg.low_heads, hd).transpose(1, 0, 2)
        lk = (pooled @ w.lo_k).reshape(n_win, cfg.low_heads, hd).transpose(1, 0, 2)
        lv = (pooled @ w.lo_v).reshape(n_win, cfg.low_heads, hd).transpose(1, 0, 2)
        lo_attn = _softmax_rows((lq @ lk.transpose(0, 2, 1)) * scale)  # (Lh, HW, n_win)
        out = lo_attn @ lv  # (Lh, HW, hd)
        out = out.transpose(1, 0, 2).reshape(h, wd, cfg.low_heads * hd)
        parts.append(out)

    merged = parts[0] if len(parts) == 1 else np.concatenate(parts, axis=-1)
    result = merged.reshape(h * wd, c) @ w.attn_out
    result = result.reshape(h, wd, c)
    if return_attn:
        return result, hi_attn, lo_attn
    return result


def regression_forward(feat, w: HeadWeights, out_dim: int = 5) -> np.ndarray:
    """Map a flattened backbone feature to the grasp output vector."""
    feat = np.ascontiguousarray(np.asarray(feat), dtype=np.float32)
    if feat.shape != (FEATURE_DIM,):
        raise ShapeMismatch(f"expected a ({FEATURE_DIM},) feature, got shape {feat.shape}")
    if out_dim not in OUTPUT_DIMS:
        raise ShapeMismatch(f"out_dim must be one of {OUTPUT_DIMS}, got {out_dim}")
    validate_regression_shapes(w)
    if w.out_dim != out_dim:
        raise ShapeMismatch(f"fc3 produces {w.out_dim} outputs, requested {out_dim}")
    y = leaky_relu(feat @ w.fc1_weight + w.fc1_bias)
    y = leaky_relu(y @ w.fc2_weight + w.fc2_bias)
    return y @ w.fc3_weight + w.fc3_bias

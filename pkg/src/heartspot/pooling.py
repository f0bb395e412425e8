"""Sliding-window order-statistic filters.

Median pooling privatizes texture while keeping edges; quantile pooling is
the same machinery at an arbitrary rank and is reused to densify sparse
saliency reconstructions.

Geometry is "same"-style: an axis of extent H pooled at stride s yields
ceil(H / s) outputs, achieved by replicate padding of
max(0, (out - 1) * s + k - H) pixels split evenly with the extra pixel on
the trailing side. The selected value is the ascending-sort element at
index floor(q * (count - 1)), never an interpolation, so integer images
stay integer and q = 0 / 0.5 / 1 give the window minimum, lower median
and maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

# Cap on elements materialized per chunk while pooling (keeps k=24 windows
# over a full image under ~100 MB).
_CHUNK_ELEMENTS = 4_000_000


@dataclass(frozen=True)
class PoolSpec:
    """Kernel side ``k``, stride ``s`` and quantile ``q`` of one pool."""

    k: int
    s: int = 1
    q: float = 0.5

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"kernel size must be >= 1, got {self.k}")
        if self.s < 1:
            raise ValueError(f"stride must be >= 1, got {self.s}")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"quantile must lie in [0, 1], got {self.q}")


def pooled_extent(extent: int, stride: int) -> int:
    """Output extent of one axis: ceil(extent / stride)."""
    return -(-extent // stride)


def quantile_pool(img: np.ndarray, spec: PoolSpec) -> np.ndarray:
    """Order-statistic pool of a 2-D array under ``spec``."""
    if img.ndim != 2 or img.size == 0:
        raise ValueError(f"expected a non-empty 2-D array, got shape {img.shape}")
    k, s = spec.k, spec.s
    h, w = img.shape
    out_h = pooled_extent(h, s)
    out_w = pooled_extent(w, s)
    pad_h = max(0, (out_h - 1) * s + k - h)
    pad_w = max(0, (out_w - 1) * s + k - w)
    padded = np.pad(
        img,
        ((pad_h // 2, pad_h - pad_h // 2), (pad_w // 2, pad_w - pad_w // 2)),
        mode="edge",
    )
    rank = math.floor(spec.q * (k * k - 1))
    windows = sliding_window_view(padded, (k, k))[::s, ::s]
    out = np.empty((out_h, out_w), dtype=img.dtype)
    rows_per_chunk = max(1, _CHUNK_ELEMENTS // max(1, out_w * k * k))
    for r0 in range(0, out_h, rows_per_chunk):
        chunk = windows[r0:r0 + rows_per_chunk]
        flat = chunk.reshape(chunk.shape[0], out_w, k * k)
        out[r0:r0 + rows_per_chunk] = np.partition(flat, rank, axis=-1)[..., rank]
    return out


def median_pool(img: np.ndarray, k: int, s: int = 1) -> np.ndarray:
    """Median pool: quantile pool at q = 0.5 (lower median for even counts)."""
    return quantile_pool(img, PoolSpec(k=k, s=s, q=0.5))

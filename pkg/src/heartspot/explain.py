"""Rebuild viewable saliency images from attributions over sampled pixels.

The original X-ray never enters this path. An attribution vector (one
float per kept pixel, in the packet's row-major mask order) is scattered
back onto the mask grid, then a high-quantile pool with a large kernel
turns the sparse scatter into a readable map: windows dense enough in
samples take on their level, isolated spikes and outliers wash out.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .imaging import encode_image
from .codec import reconstruct
from .pooling import PoolSpec, quantile_pool
from .priors import BinaryMask

SMOOTH_KERNEL = 24
SMOOTH_QUANTILE = 0.9
SMOOTH_STRIDE = 1


def load_attribution(path) -> np.ndarray:
    """Read a raw little-endian float32 vector (.f32 file)."""
    vec = np.fromfile(Path(path), dtype="<f4")
    return vec


def attribution_to_image(attr: np.ndarray, mask: BinaryMask) -> np.ndarray:
    """Scatter attribution values onto the mask grid (float image)."""
    vec = np.asarray(attr, dtype=np.float32)
    if vec.ndim != 1:
        raise ValueError(f"attribution vector must be 1-D, got shape {vec.shape}")
    if not np.isfinite(vec).all():
        raise ValueError("attribution values must all be finite")
    return reconstruct(vec, mask)


def smooth_attribution(
    sparse: np.ndarray,
    k: int = SMOOTH_KERNEL,
    q: float = SMOOTH_QUANTILE,
    s: int = SMOOTH_STRIDE,
) -> np.ndarray:
    """Densify a sparse attribution image by quantile pooling.

    With the defaults each output pixel is the 90th-percentile value of its
    24x24 window, so regions where at least ~10% of pixels carry values
    turn solid while sparser speckle drops to the background.
    """
    return quantile_pool(sparse, PoolSpec(k=k, s=s, q=q))


def render_heatmap(img: np.ndarray) -> bytes:
    """Min-max normalize a float image to 8 bits and encode as PNG.

    Constant images (no signal) render as black.
    """
    arr = np.asarray(img, dtype=np.float64)
    if not np.isfinite(arr).all():
        raise ValueError("heatmap values must all be finite")
    lo = arr.min()
    hi = arr.max()
    if hi > lo:
        scaled = np.rint((arr - lo) / (hi - lo) * 255.0)
    else:
        scaled = np.zeros_like(arr)
    return encode_image(scaled.astype(np.uint8), "png")

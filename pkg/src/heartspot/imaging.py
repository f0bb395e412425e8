"""Grayscale image I/O and geometry.

Images are plain 2-D numpy arrays, row-major, origin at the top left:
``uint8`` for pixel data, floating point for attribution maps. Files move
through PNG (lossless) and JPEG (quality-controlled) only; callers are
expected to pre-resize, this module only crops.
"""

from __future__ import annotations

import io

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from .errors import DecodeError, ShapeError

_BT601 = np.array([0.299, 0.587, 0.114])


def decode_image(data: bytes) -> np.ndarray:
    """Decode PNG or JPEG bytes into a uint8 grayscale array.

    Color inputs are reduced to luminance with BT.601 weights and rounded
    to the nearest 8-bit value. 16-bit grayscale inputs keep their top
    8 bits.
    """
    try:
        img = PILImage.open(io.BytesIO(data))
        img.load()
    except UnidentifiedImageError as exc:
        raise DecodeError(f"container not recognized: {exc}") from exc
    except OSError as exc:
        raise DecodeError(f"pixel data unreadable: {exc}") from exc
    if img.mode == "L":
        return np.asarray(img, dtype=np.uint8).copy()
    if img.mode in ("I", "I;16"):
        wide = np.asarray(img, dtype=np.int64)
        return (wide >> 8).astype(np.uint8)
    rgb = np.asarray(img.convert("RGB"), dtype=np.float64)
    luma = rgb @ _BT601
    return np.clip(np.rint(luma), 0, 255).astype(np.uint8)


def center_crop(img: np.ndarray, side: int) -> np.ndarray:
    """Cut the centered ``side`` x ``side`` window out of ``img``.

    Odd remainders leave the extra row/column on the bottom/right. There is
    no padding: images smaller than ``side`` are rejected.
    """
    if side <= 0:
        raise ValueError(f"crop side must be positive, got {side}")
    h, w = img.shape
    if side > h or side > w:
        raise ShapeError(f"crop side {side} exceeds image dimensions {h}x{w}")
    r0 = (h - side) // 2
    c0 = (w - side) // 2
    return img[r0:r0 + side, c0:c0 + side].copy()


def encode_image(img: np.ndarray, fmt: str = "png", quality: int = 95) -> bytes:
    """Encode a uint8 grayscale array as PNG (lossless) or JPEG bytes."""
    if img.dtype != np.uint8:
        raise TypeError(f"8-bit image required, got dtype {img.dtype}; quantize first")
    pil = PILImage.fromarray(img, mode="L")
    buf = io.BytesIO()
    name = fmt.lower()
    if name == "png":
        pil.save(buf, format="PNG")
    elif name in ("jpeg", "jpg"):
        pil.save(buf, format="JPEG", quality=int(quality))
    else:
        raise ValueError(f"unsupported image format {fmt!r}")
    return buf.getvalue()

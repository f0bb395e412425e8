"""Spatial sampling priors: which pixels of a chest X-ray survive.

Four mask families. Evenly spaced horizontal rows cover the band where a
heart can sit (enough to read off transverse diameters). Random lines with
endpoints on opposite halves of a circle around the frame preserve area
cues at arbitrary orientations. A region-of-interest mask is thresholded
from an averaged attribution image. Set algebra combines them: lines are
unioned, then intersected with the region of interest to drop background.

Every mask is a pure function of its :class:`PriorSpec` (plus the heart
saliency file pinned by digest), which is what makes packets decodable
without shipping the mask itself.
"""

from __future__ import annotations

import hashlib
import io
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from .errors import DecodeError, IntegrityError, ShapeError
from .imaging import encode_image
from .pooling import PoolSpec, median_pool, pooled_extent
from .rng import RNG_PCG32_BOX_MULLER, Pcg32, make_rng, KNOWN_RNG_IDS

# Threshold quantile used whenever a heart mask is rebuilt from a spec or
# packet header. Fixed (the header does not carry it); chosen so the
# shipped synthetic saliency keeps about 47% of the frame.
DEFAULT_HEART_QUANTILE = 0.53

_ZERO_DIGEST = b"\x00" * 32


@dataclass(frozen=True)
class PriorSpec:
    """Complete recipe for one sampling mask.

    ``height``/``width`` are the grid the mask lives on, which is the
    post-pooling grid when ``mp`` is set. ``seed``/``rng_id`` pin the
    random-line stream; ``heart_hash`` pins the exact saliency file a heart
    mask must be rebuilt from (sha-256 of the file bytes). Fields of
    disabled methods keep their defaults and are ignored.
    """

    height: int
    width: int
    use_hline: bool = False
    hline_start: int = 0
    hline_stop: int = 0
    hline_step: int = 1
    use_rline: bool = False
    n_lines: int = 0
    seed: int = 0
    rng_id: int = RNG_PCG32_BOX_MULLER
    use_heart: bool = False
    heart_hash: bytes = _ZERO_DIGEST
    mp: PoolSpec | None = None

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise ValueError(f"mask grid must be positive, got {self.height}x{self.width}")
        if not (self.use_hline or self.use_rline or self.use_heart):
            raise ValueError("at least one sampling method must be enabled")
        if self.use_hline:
            if self.hline_step < 1:
                raise ValueError(f"row step must be >= 1, got {self.hline_step}")
            if not 0 <= self.hline_start <= self.hline_stop <= self.height:
                raise ValueError(
                    f"row range {self.hline_start}:{self.hline_stop} does not fit "
                    f"a height-{self.height} grid"
                )
        if self.use_rline:
            if self.n_lines < 1:
                raise ValueError(f"line count must be >= 1, got {self.n_lines}")
            if self.rng_id not in KNOWN_RNG_IDS:
                raise ValueError(f"unknown rng_id {self.rng_id}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if len(self.heart_hash) != 32:
            raise ValueError("heart_hash must be a 32-byte digest")


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Boolean raster of kept pixels plus the recipe that produced it."""

    bits: np.ndarray
    spec: PriorSpec | None = None

    def __post_init__(self):
        if self.bits.ndim != 2 or self.bits.dtype != np.bool_:
            raise ValueError("mask bits must be a 2-D boolean array")

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def popcount(self) -> int:
        return int(self.bits.sum())


@dataclass(frozen=True)
class CirclePointPair:
    """One random line: unit-circle endpoints on opposite half-circles.

    Points are (x, y) with x <= 0 for ``left`` and x >= 0 for ``right``;
    x maps to the horizontal image axis.
    """

    left: tuple[float, float]
    right: tuple[float, float]


@dataclass(frozen=True)
class HeartReference:
    """A loaded heart saliency average and the digest of its source file."""

    saliency: np.ndarray
    digest: bytes


def _frozen(bits: np.ndarray) -> np.ndarray:
    bits.flags.writeable = False
    return bits


def hline_mask(height: int, width: int, start: int, stop: int, step: int) -> BinaryMask:
    """Mask of every ``step``-th row in the half-open band [start, stop)."""
    if step < 1:
        raise ValueError(f"row step must be >= 1, got {step}")
    if not 0 <= start <= stop <= height:
        raise ValueError(f"row range {start}:{stop} does not fit a height-{height} grid")
    if start == stop:
        raise ValueError(f"row range {start}:{stop} is empty, mask would keep nothing")
    bits = np.zeros((height, width), dtype=bool)
    bits[start:stop:step, :] = True
    spec = PriorSpec(
        height=height, width=width,
        use_hline=True, hline_start=start, hline_stop=stop, hline_step=step,
    )
    return BinaryMask(bits=_frozen(bits), spec=spec)


def _unit_point(rng: Pcg32) -> tuple[float, float]:
    while True:
        zx, zy = rng.next_normal_pair()
        norm = math.hypot(zx, zy)
        if norm > 0.0:
            return zx / norm, zy / norm


def sample_circle_pair(rng: Pcg32) -> CirclePointPair:
    """Draw one left/right endpoint pair, uniform per half-circle.

    Each endpoint normalizes an independent standard-normal 2-vector onto
    the unit circle, then is reflected onto its half-plane (x <= 0 for the
    left role, x >= 0 for the right).
    """
    lx, ly = _unit_point(rng)
    rx, ry = _unit_point(rng)
    return CirclePointPair(left=(-abs(lx), ly), right=(abs(rx), ry))


def bresenham_line(
    p0: tuple[int, int], p1: tuple[int, int], height: int, width: int
) -> list[tuple[int, int]]:
    """Rasterize the segment p0 -> p1, keeping only in-raster pixels.

    Coordinates are (row, col) integers; endpoints may lie outside the
    raster, and a segment that misses it entirely yields an empty list.
    Classic integer error accumulation, at most one step per axis per
    pixel, so the walk is monotone along the major axis and consecutive
    in-bounds pixels are 8-adjacent. Exact half-step ties fall toward the
    destination endpoint.
    """
    r0, c0 = p0
    r1, c1 = p1
    if (r0, c0) == (r1, c1):
        raise ValueError("degenerate segment: endpoints coincide")
    dr = abs(r1 - r0)
    dc = abs(c1 - c0)
    sr = 1 if r0 < r1 else -1
    sc = 1 if c0 < c1 else -1
    err = dc - dr
    pts: list[tuple[int, int]] = []
    r, c = r0, c0
    while True:
        if 0 <= r < height and 0 <= c < width:
            pts.append((r, c))
        e2 = 2 * err
        if e2 >= -dr:
            if c == c1:
                break
            err -= dr
            c += sc
        if e2 <= dc:
            if r == r1:
                break
            err += dc
            r += sr
    return pts


def _round_half_away(v: float) -> int:
    if v >= 0.0:
        return math.floor(v + 0.5)
    return math.ceil(v - 0.5)


@lru_cache(maxsize=32)
def _rline_bits(height: int, width: int, n_lines: int, seed: int, rng_id: int) -> np.ndarray:
    rng = make_rng(seed, rng_id)
    bits = np.zeros((height, width), dtype=bool)
    center_r = (height - 1) / 2.0
    center_c = (width - 1) / 2.0
    scale = float(max(height, width))
    for _ in range(n_lines):
        pair = sample_circle_pair(rng)
        p0 = (
            _round_half_away(center_r + scale * pair.left[1]),
            _round_half_away(center_c + scale * pair.left[0]),
        )
        p1 = (
            _round_half_away(center_r + scale * pair.right[1]),
            _round_half_away(center_c + scale * pair.right[0]),
        )
        if p0 == p1:
            if 0 <= p0[0] < height and 0 <= p0[1] < width:
                bits[p0] = True
            continue
        for r, c in bresenham_line(p0, p1, height, width):
            bits[r, c] = True
    return _frozen(bits)


def rline_mask(
    height: int,
    width: int,
    n_lines: int,
    seed: int,
    rng_id: int = RNG_PCG32_BOX_MULLER,
) -> BinaryMask:
    """Union of ``n_lines`` random transverse lines, reproducible from the seed.

    Endpoints are circle points scaled by max(height, width) around the
    raster center ((H-1)/2, (W-1)/2), which keeps them outside the frame,
    then rounded half-away-from-zero to pixel coordinates and rasterized.
    The mask depends only on the arguments, never on image content.
    """
    if n_lines < 1:
        raise ValueError(f"line count must be >= 1, got {n_lines}")
    bits = _rline_bits(height, width, n_lines, seed, rng_id)
    spec = PriorSpec(
        height=height, width=width,
        use_rline=True, n_lines=n_lines, seed=seed, rng_id=rng_id,
    )
    return BinaryMask(bits=bits, spec=spec)


def heart_mask_from_saliency(
    saliency: np.ndarray, threshold_quantile: float = DEFAULT_HEART_QUANTILE
) -> BinaryMask:
    """Threshold an averaged attribution image into a region-of-interest mask.

    The cut sits at the nearest-rank quantile of all pixel values (the
    ascending-sort element at index floor(q * n)); pixels at or above it
    survive, so distinct-valued images keep close to a (1 - q) fraction.
    """
    arr = np.asarray(saliency, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"expected a non-empty 2-D saliency image, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("saliency values must all be finite")
    if not 0.0 < threshold_quantile < 1.0:
        raise ValueError(f"threshold quantile must lie strictly in (0, 1), got {threshold_quantile}")
    if arr.min() == arr.max():
        raise ValueError("constant saliency image: threshold would keep all or nothing")
    ordered = np.sort(arr, axis=None)
    threshold = ordered[math.floor(threshold_quantile * arr.size)]
    bits = arr >= threshold
    return BinaryMask(bits=_frozen(bits), spec=None)


def combine_masks(
    hline: BinaryMask | None = None,
    rline: BinaryMask | None = None,
    heart: BinaryMask | None = None,
    spec: PriorSpec | None = None,
) -> BinaryMask:
    """(hline | rline) & heart, with absent masks dropping out.

    Absent line masks leave the union, an absent heart mask means no
    intersection, and heart alone passes through unchanged.
    """
    present = [m for m in (hline, rline, heart) if m is not None]
    if not present:
        raise ValueError("no masks to combine")
    shape = present[0].bits.shape
    for m in present[1:]:
        if m.bits.shape != shape:
            raise ShapeError(f"mask dimensions differ: {m.bits.shape} vs {shape}")
    lines = [m for m in (hline, rline) if m is not None]
    if lines:
        bits = np.zeros(shape, dtype=bool)
        for m in lines:
            bits |= m.bits
        if heart is not None:
            bits &= heart.bits
    else:
        bits = heart.bits.copy()
    if not bits.any():
        raise ValueError("combined mask is empty, nothing would be sampled")
    return BinaryMask(bits=_frozen(bits), spec=spec)


def _decode_saliency_png(data: bytes) -> np.ndarray:
    try:
        img = PILImage.open(io.BytesIO(data))
        img.load()
    except UnidentifiedImageError as exc:
        raise DecodeError(f"container not recognized: {exc}") from exc
    except OSError as exc:
        raise DecodeError(f"pixel data unreadable: {exc}") from exc
    if img.mode == "L":
        return np.asarray(img, dtype=np.float64) / 255.0
    if img.mode in ("I", "I;16"):
        return np.asarray(img, dtype=np.float64) / 65535.0
    raise DecodeError(f"heart saliency must be 8- or 16-bit grayscale, got mode {img.mode!r}")


def heart_reference_from_bytes(data: bytes) -> HeartReference:
    """Build a heart reference from raw PNG bytes (digest = sha-256 of them)."""
    return HeartReference(
        saliency=_decode_saliency_png(data),
        digest=hashlib.sha256(data).digest(),
    )


def load_heart_reference(path) -> HeartReference:
    """Load a grayscale PNG saliency average and fingerprint the file."""
    return heart_reference_from_bytes(Path(path).read_bytes())


def generate_mask(spec: PriorSpec, heart: HeartReference | None = None) -> BinaryMask:
    """Rebuild the sampling mask for ``spec``, bit-exactly.

    When ``spec.use_heart`` is set the loaded reference must be supplied
    and must match ``spec.heart_hash``; with pooling enabled the saliency
    is median-pooled onto the ``spec`` grid before thresholding.
    """
    hline = None
    if spec.use_hline:
        hline = hline_mask(
            spec.height, spec.width, spec.hline_start, spec.hline_stop, spec.hline_step
        )
    rline = None
    if spec.use_rline:
        rline = rline_mask(spec.height, spec.width, spec.n_lines, spec.seed, spec.rng_id)
    heart_m = None
    if spec.use_heart:
        if heart is None:
            raise IntegrityError("spec requires a heart saliency file but none was supplied")
        if heart.digest != spec.heart_hash:
            raise IntegrityError(
                "heart saliency digest mismatch: expected "
                f"{spec.heart_hash.hex()}, got {heart.digest.hex()}"
            )
        sal = heart.saliency
        if spec.mp is not None:
            sal = median_pool(sal, spec.mp.k, spec.mp.s)
        if sal.shape != (spec.height, spec.width):
            raise ShapeError(
                f"heart saliency grid {sal.shape} does not match mask grid "
                f"{(spec.height, spec.width)}"
            )
        heart_m = heart_mask_from_saliency(sal)
    combined = combine_masks(hline=hline, rline=rline, heart=heart_m, spec=spec)
    return combined


def mask_to_png(mask: BinaryMask) -> bytes:
    """Export mask bits as an 8-bit PNG, 255 for kept pixels."""
    return encode_image(mask.bits.astype(np.uint8) * 255, "png")


def mask_from_png(data: bytes, spec: PriorSpec | None = None) -> BinaryMask:
    """Import a mask PNG written by :func:`mask_to_png` (nonzero = kept)."""
    try:
        img = PILImage.open(io.BytesIO(data))
        img.load()
    except (UnidentifiedImageError, OSError) as exc:
        raise DecodeError(f"mask PNG unreadable: {exc}") from exc
    bits = np.asarray(img.convert("L")) >= 128
    return BinaryMask(bits=_frozen(bits), spec=spec)


def synthetic_heart_saliency(height: int = 320, width: int = 320) -> np.ndarray:
    """Stand-in for an averaged attribution image over many chest X-rays.

    A smooth elliptical hot spot, centered a little left of and below the
    frame center, falling off radially so that quantile thresholds carve
    out nested ellipses. At the default threshold the kept region covers
    about 47% of the frame. Values are floats in [0, 1].
    """
    rows = np.arange(height, dtype=np.float64)[:, None]
    cols = np.arange(width, dtype=np.float64)[None, :]
    dr = (rows - 0.56 * (height - 1)) / (0.62 * height)
    dc = (cols - 0.42 * (width - 1)) / (0.56 * width)
    field = np.exp(-(dr * dr + dc * dc))
    lo, hi = field.min(), field.max()
    return (field - lo) / (hi - lo)


def default_heart_mask_grid(height: int, width: int, mp: PoolSpec | None) -> tuple[int, int]:
    """Grid a heart mask ends up on after optional pooling of the saliency."""
    if mp is None:
        return height, width
    return pooled_extent(height, mp.s), pooled_extent(width, mp.s)

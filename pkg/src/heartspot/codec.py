"""Packet container for privatized pixel vectors, plus compression metrics.

A packet stores the sampling recipe and the kept pixels only; the mask is
rebuilt from the recipe at decode time. On-disk layout (integers
little-endian, fields of disabled methods written as zeros):

    offset size  field
    0      4     magic b"HSPT"
    4      1     version (currently 1)
    5      1     method flags: bit0 hline, bit1 rline, bit2 heart, bit3 mp
    6      2     mask grid height
    8      2     mask grid width
    10     1     median-pool kernel k
    11     1     median-pool stride s
    12     2     hline start row
    14     2     hline stop row (exclusive)
    16     2     hline row step
    18     2     random line count
    20     8     random line seed
    28     1     rng id
    29     32    sha-256 of the heart saliency file
    61     4     payload length in bytes
    65     ...   xz stream (LZMA preset 6) of the flat pixel vector

The payload decompresses to exactly popcount(mask) bytes, one uint8 sample
per kept pixel in row-major order.
"""

from __future__ import annotations

import lzma
import struct

import numpy as np

from .errors import CorruptionError, FormatError, ShapeError
from .imaging import encode_image
from .pooling import PoolSpec, median_pool
from .priors import BinaryMask, HeartReference, PriorSpec, generate_mask
from .rng import RNG_PCG32_BOX_MULLER

MAGIC = b"HSPT"
VERSION = 1
LZMA_PRESET = 6

_FLAG_HLINE = 1
_FLAG_RLINE = 2
_FLAG_HEART = 4
_FLAG_MP = 8

_HEADER = struct.Struct("<4sBBHHBBHHHHQB32sI")
HEADER_SIZE = _HEADER.size  # 65


def flatten(img: np.ndarray, mask: BinaryMask) -> np.ndarray:
    """Kept pixels of ``img`` in row-major scan order."""
    if img.shape != mask.bits.shape:
        raise ShapeError(f"image {img.shape} and mask {mask.bits.shape} dimensions differ")
    return img[mask.bits]


def reconstruct(vec: np.ndarray, mask: BinaryMask) -> np.ndarray:
    """Scatter a flat vector back onto the mask grid, zeros elsewhere."""
    vec = np.asarray(vec)
    if vec.ndim != 1 or vec.shape[0] != mask.popcount:
        raise ShapeError(
            f"vector length {vec.shape if vec.ndim != 1 else vec.shape[0]} does not "
            f"match mask popcount {mask.popcount}"
        )
    out = np.zeros(mask.bits.shape, dtype=vec.dtype)
    out[mask.bits] = vec
    return out


def _check_u16(value: int, what: str) -> int:
    if not 0 <= value < 1 << 16:
        raise ValueError(f"{what} {value} does not fit the container's 16-bit field")
    return value


def pack_header(spec: PriorSpec, payload_len: int) -> bytes:
    """Serialize a spec into the fixed 65-byte header."""
    flags = 0
    if spec.use_hline:
        flags |= _FLAG_HLINE
    if spec.use_rline:
        flags |= _FLAG_RLINE
    if spec.use_heart:
        flags |= _FLAG_HEART
    if spec.mp is not None:
        flags |= _FLAG_MP
    mp_k = mp_s = 0
    if spec.mp is not None:
        if not (1 <= spec.mp.k < 256 and 1 <= spec.mp.s < 256):
            raise ValueError("pool kernel and stride must fit the container's 8-bit fields")
        mp_k, mp_s = spec.mp.k, spec.mp.s
    return _HEADER.pack(
        MAGIC,
        VERSION,
        flags,
        _check_u16(spec.height, "mask height"),
        _check_u16(spec.width, "mask width"),
        mp_k,
        mp_s,
        _check_u16(spec.hline_start, "hline start") if spec.use_hline else 0,
        _check_u16(spec.hline_stop, "hline stop") if spec.use_hline else 0,
        _check_u16(spec.hline_step, "hline step") if spec.use_hline else 0,
        _check_u16(spec.n_lines, "line count") if spec.use_rline else 0,
        spec.seed if spec.use_rline else 0,
        spec.rng_id if spec.use_rline else 0,
        spec.heart_hash if spec.use_heart else b"\x00" * 32,
        payload_len,
    )


def unpack_header(data: bytes) -> tuple[PriorSpec, int]:
    """Parse and validate a header, returning (spec, payload_len)."""
    if len(data) < HEADER_SIZE:
        raise FormatError(f"truncated header: {len(data)} bytes, need {HEADER_SIZE}")
    (magic, version, flags, height, width, mp_k, mp_s,
     hl_start, hl_stop, hl_step, n_lines, seed, rng_id,
     heart_hash, payload_len) = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"unsupported container version {version}, expected {VERSION}")
    if flags & ~(_FLAG_HLINE | _FLAG_RLINE | _FLAG_HEART | _FLAG_MP):
        raise FormatError(f"unknown method flag bits in 0x{flags:02x}")
    use_hline = bool(flags & _FLAG_HLINE)
    use_rline = bool(flags & _FLAG_RLINE)
    use_heart = bool(flags & _FLAG_HEART)
    use_mp = bool(flags & _FLAG_MP)
    try:
        mp = PoolSpec(k=mp_k, s=mp_s) if use_mp else None
        spec = PriorSpec(
            height=height,
            width=width,
            use_hline=use_hline,
            hline_start=hl_start if use_hline else 0,
            hline_stop=hl_stop if use_hline else 0,
            hline_step=hl_step if use_hline else 1,
            use_rline=use_rline,
            n_lines=n_lines if use_rline else 0,
            seed=seed if use_rline else 0,
            rng_id=rng_id if use_rline else RNG_PCG32_BOX_MULLER,
            use_heart=use_heart,
            heart_hash=heart_hash if use_heart else b"\x00" * 32,
            mp=mp,
        )
    except ValueError as exc:
        raise FormatError(f"inconsistent header fields: {exc}") from exc
    return spec, payload_len


def encode_packet(
    img: np.ndarray, spec: PriorSpec, heart: HeartReference | None = None
) -> bytes:
    """Privatize one center-cropped 8-bit image into packet bytes.

    Median pooling (when ``spec.mp`` is set) runs on the image first; the
    mask is then rebuilt from ``spec`` on the pooled grid, the kept pixels
    are flattened and xz-compressed. Identical inputs give identical bytes.
    """
    if img.dtype != np.uint8:
        raise TypeError(f"8-bit image required, got dtype {img.dtype}")
    work = img
    if spec.mp is not None:
        work = median_pool(img, spec.mp.k, spec.mp.s)
    if work.shape != (spec.height, spec.width):
        raise ShapeError(
            f"image grid {work.shape} (after any pooling) does not match the "
            f"spec grid {(spec.height, spec.width)}"
        )
    mask = generate_mask(spec, heart)
    vec = flatten(work, mask)
    payload = lzma.compress(vec.tobytes(), preset=LZMA_PRESET)
    return pack_header(spec, len(payload)) + payload


def decode_packet(
    data: bytes, heart: HeartReference | None = None
) -> tuple[np.ndarray, BinaryMask, PriorSpec]:
    """Rebuild (sparse image, mask, spec) from packet bytes.

    The mask is regenerated from the header (verifying the heart digest
    when one is referenced), so decoding needs no access to the original
    image.
    """
    spec, payload_len = unpack_header(data)
    payload = data[HEADER_SIZE:]
    if len(payload) != payload_len:
        raise CorruptionError(
            f"payload is {len(payload)} bytes but the header promises {payload_len}"
        )
    try:
        raw = lzma.decompress(payload)
    except lzma.LZMAError as exc:
        raise CorruptionError(f"payload stream damaged: {exc}") from exc
    mask = generate_mask(spec, heart)
    if len(raw) != mask.popcount:
        raise CorruptionError(
            f"payload decompresses to {len(raw)} samples, mask keeps {mask.popcount}"
        )
    vec = np.frombuffer(raw, dtype=np.uint8)
    return reconstruct(vec, mask), mask, spec


def encode_masked_jpeg(img: np.ndarray, mask: BinaryMask, quality: int = 95) -> bytes:
    """JPEG of the image with all non-kept pixels zeroed.

    The image-shaped alternative to a packet for masks that defeat LZMA
    (large connected regions compress far better as JPEG).
    """
    if img.shape != mask.bits.shape:
        raise ShapeError(f"image {img.shape} and mask {mask.bits.shape} dimensions differ")
    if img.dtype != np.uint8:
        raise TypeError(f"8-bit image required, got dtype {img.dtype}")
    masked = np.where(mask.bits, img, np.uint8(0))
    return encode_image(masked, "jpeg", quality)


def imr(mask: BinaryMask, original_pixels: int) -> float:
    """In-memory ratio: kept pixels over original (pre-pooling) pixels."""
    if original_pixels <= 0:
        raise ValueError(f"original pixel count must be positive, got {original_pixels}")
    return mask.popcount / original_pixels


def odr(packet_bytes: int, original_jpeg_bytes: int) -> float:
    """On-disk ratio: packet file size over the JPEG(95) size of the original."""
    if packet_bytes <= 0 or original_jpeg_bytes <= 0:
        raise ValueError("file sizes must be positive")
    return packet_bytes / original_jpeg_bytes

"""Deterministic random primitives for reproducible pixel sampling.

Sampling masks must be rebuildable bit-for-bit from a stored 64-bit seed,
on any platform, for the life of the packet format. Library generators do
not promise that across versions, so the sampler is pinned to a fixed,
fully specified construction:

* PCG32 (xsh-rr output, 64-bit LCG state) on a fixed stream constant,
* uniform doubles assembled from 53 bits of two consecutive 32-bit words,
* standard normals via the Box-Muller transform.

``RNG_PCG32_BOX_MULLER`` names this construction in stored specs and
packet headers; any change to it must be shipped under a new identifier.
"""

from __future__ import annotations

import math

from .errors import FormatError

_MULT = 6364136223846793005
_MASK64 = (1 << 64) - 1

# Stream (the LCG increment selector) is fixed as part of the identifier.
_STREAM = 54

RNG_PCG32_BOX_MULLER = 1
KNOWN_RNG_IDS = frozenset({RNG_PCG32_BOX_MULLER})

_TWO_PI = 2.0 * math.pi
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


class Pcg32:
    """Minimal PCG32, bit-compatible with the reference C implementation."""

    __slots__ = ("state", "inc")

    def __init__(self, seed: int, stream: int = _STREAM):
        self.inc = ((stream << 1) | 1) & _MASK64
        self.state = 0
        self.next_u32()
        self.state = (self.state + (seed & _MASK64)) & _MASK64
        self.next_u32()

    def next_u32(self) -> int:
        old = self.state
        self.state = (old * _MULT + self.inc) & _MASK64
        xorshifted = (((old >> 18) ^ old) >> 27) & 0xFFFFFFFF
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((-rot) & 31))) & 0xFFFFFFFF

    def next_double(self) -> float:
        """Uniform double in [0, 1) with the full 53 bits of mantissa."""
        hi = self.next_u32() >> 5  # 27 bits
        lo = self.next_u32() >> 6  # 26 bits
        return (hi * 67108864.0 + lo) * _INV_2_53

    def next_normal_pair(self) -> tuple[float, float]:
        """Two independent standard normals (Box-Muller).

        u1 = 0 would put log() out of domain; redrawing keeps the stream
        deterministic because the retry itself is part of the stream.
        """
        u1 = self.next_double()
        while u1 == 0.0:
            u1 = self.next_double()
        u2 = self.next_double()
        radius = math.sqrt(-2.0 * math.log(u1))
        theta = _TWO_PI * u2
        return radius * math.cos(theta), radius * math.sin(theta)


def make_rng(seed: int, rng_id: int = RNG_PCG32_BOX_MULLER) -> Pcg32:
    """Instantiate the generator named by ``rng_id``, seeded and ready."""
    if rng_id not in KNOWN_RNG_IDS:
        raise FormatError(f"unknown rng_id {rng_id}")
    return Pcg32(seed)

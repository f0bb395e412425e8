"""Synthetic chest-radiograph phantoms for tests, demos and benchmarks.

Not anatomy, just the right statistics: a bright soft-tissue torso, darker
lung fields with rib banding, a cardiac blob left of center, a spine
column and mild sensor noise. Deterministic per seed.
"""

from __future__ import annotations

import numpy as np


def _soft_ellipse(rr, cc, center_r, center_c, rad_r, rad_c, sharpness=14.0):
    d = ((rr - center_r) / rad_r) ** 2 + ((cc - center_c) / rad_c) ** 2
    return 1.0 / (1.0 + np.exp(sharpness * (d - 1.0)))


def xray_phantom(height: int = 320, width: int = 320, seed: int = 0) -> np.ndarray:
    """One uint8 phantom image; identical output for identical arguments."""
    rng = np.random.default_rng(seed)
    rr = np.linspace(0.0, 1.0, height)[:, None] * np.ones((1, width))
    cc = np.ones((height, 1)) * np.linspace(0.0, 1.0, width)[None, :]

    jitter = lambda lo, hi: float(rng.uniform(lo, hi))

    img = np.full((height, width), 0.06)
    body = _soft_ellipse(rr, cc, jitter(0.52, 0.58), jitter(0.48, 0.52),
                         jitter(0.50, 0.56), jitter(0.40, 0.46))
    img += 0.50 * body

    for lung_c in (jitter(0.30, 0.34), jitter(0.66, 0.70)):
        lung = _soft_ellipse(rr, cc, jitter(0.40, 0.44), lung_c,
                             jitter(0.22, 0.26), jitter(0.12, 0.15))
        img -= 0.24 * lung
        ribs = 0.05 * np.sin(2.0 * np.pi * (rr * height) / jitter(26.0, 32.0)
                             + jitter(0.0, 6.28))
        img += ribs * lung

    heart = _soft_ellipse(rr, cc, jitter(0.56, 0.60), jitter(0.42, 0.46),
                          jitter(0.14, 0.18), jitter(0.16, 0.20))
    img += 0.16 * heart

    spine = np.exp(-((cc - 0.5) / 0.045) ** 2)
    img += 0.10 * spine * body

    img += rng.normal(0.0, 0.015, size=(height, width))
    return np.clip(np.rint(img * 255.0), 0, 255).astype(np.uint8)


def phantom_corpus(n: int, height: int = 320, width: int = 320, seed: int = 0) -> list[np.ndarray]:
    """A list of ``n`` phantoms with per-image seeds derived from ``seed``."""
    return [xray_phantom(height, width, seed=seed + i) for i in range(n)]

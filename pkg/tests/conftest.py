"""Shared fixtures: phantom corpus on disk and the heart template file."""

import io

import numpy as np
import pytest
from PIL import Image

from heartspot.imaging import encode_image
from heartspot.phantom import xray_phantom
from heartspot.priors import synthetic_heart_saliency


def heart_template_png(height: int = 320, width: int = 320) -> bytes:
    """16-bit grayscale PNG of the synthetic saliency template."""
    sal = synthetic_heart_saliency(height, width)
    arr = np.round(sal * 65535.0).astype(np.uint16)
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PNG")
    return buf.getvalue()


@pytest.fixture(scope="session")
def heart_png_bytes() -> bytes:
    return heart_template_png()


@pytest.fixture(scope="session")
def heart_png_file(tmp_path_factory, heart_png_bytes):
    path = tmp_path_factory.mktemp("heart") / "heart_template.png"
    path.write_bytes(heart_png_bytes)
    return path


@pytest.fixture(scope="session")
def phantom_dir(tmp_path_factory):
    """Twenty seeded 320x320 phantom PNGs."""
    root = tmp_path_factory.mktemp("phantoms")
    for i in range(20):
        (root / f"phantom_{i:03d}.png").write_bytes(encode_image(xray_phantom(seed=i)))
    return root

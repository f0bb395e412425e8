"""Reproduce the headline compression table on a phantom corpus.

For each sampling method this prints the mean mask ratio (kept pixels over
original pixels) and the mean on-disk ratio (packet bytes over JPEG-95 bytes
of the same crop). The heart row is stored as a masked JPEG because a filled
region survives DCT coding far better than a packed flat vector.
"""

import argparse
import tempfile
from pathlib import Path

import numpy as np
from PIL import Image

from heartspot.cli import METHODS, RunConfig, build_spec
from heartspot.codec import encode_masked_jpeg, encode_packet, imr, odr
from heartspot.imaging import decode_image, encode_image
from heartspot.phantom import phantom_corpus
from heartspot.priors import generate_mask, synthetic_heart_saliency


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-n", "--count", type=int, default=20, help="phantoms to average over")
    ap.add_argument("--seed", type=int, default=0, help="seed of the first phantom")
    ap.add_argument("--line-seed", type=int, default=0, help="seed for the random-line mask")
    ap.add_argument("--corpus", type=Path, default=None,
                    help="PNG folder to measure instead of generated phantoms")
    args = ap.parse_args()

    if args.corpus is not None:
        images = [decode_image(p.read_bytes()) for p in sorted(args.corpus.glob("*.png"))]
    else:
        images = phantom_corpus(args.count, seed=args.seed)
    if not images:
        ap.error("no input images")

    workdir = Path(tempfile.mkdtemp(prefix="heartspot_table_"))
    template = workdir / "heart_template.png"
    sal = synthetic_heart_saliency(images[0].shape[0], images[0].shape[1])
    Image.fromarray(np.round(sal * 65535.0).astype(np.uint16)).save(template)

    config = RunConfig(
        seed=args.line_seed,
        crop_side=images[0].shape[0],
        heart_mask_path=str(template),
    )
    original = images[0].size

    print(f"{'method':<16} {'imr':>8} {'odr':>8}   ({len(images)} images)")
    for method in METHODS:
        spec, heart = build_spec(config, method=method)
        mask = generate_mask(spec, heart)
        ratio = imr(mask, original)
        disk = []
        for img in images:
            reference = encode_image(img, fmt="jpeg", quality=95)
            if method == "heart":
                blob = encode_masked_jpeg(img, mask, quality=95)
            else:
                blob = encode_packet(img, spec, heart)
            disk.append(odr(len(blob), len(reference)))
        print(f"{method:<16} {ratio:>8.4f} {sum(disk) / len(disk):>8.4f}")


if __name__ == "__main__":
    main()

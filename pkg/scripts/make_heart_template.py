"""Write the built-in cardiac saliency template as a 16-bit grayscale PNG.

The output is the file the CLI's heart-gated methods expect via --heart-mask.
"""

import argparse
from pathlib import Path

import numpy as np
from PIL import Image

from heartspot.priors import synthetic_heart_saliency


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--height", type=int, default=320)
    ap.add_argument("--width", type=int, default=320)
    ap.add_argument("-o", "--out", type=Path, default=Path("heart_template.png"))
    args = ap.parse_args()

    sal = synthetic_heart_saliency(args.height, args.width)
    img = Image.fromarray(np.round(sal * 65535.0).astype(np.uint16))
    img.save(args.out)
    print(f"wrote {args.out} ({args.height}x{args.width}, 16-bit)")


if __name__ == "__main__":
    main()

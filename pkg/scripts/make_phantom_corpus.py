"""Generate a folder of synthetic chest phantoms for benchmarking."""

import argparse
from pathlib import Path

from heartspot.imaging import encode_image
from heartspot.phantom import xray_phantom


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-n", "--count", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0, help="seed of the first phantom")
    ap.add_argument("--side", type=int, default=320)
    ap.add_argument("-o", "--out", type=Path, default=Path("phantoms"))
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        img = xray_phantom(height=args.side, width=args.side, seed=args.seed + i)
        path = args.out / f"phantom_{i:03d}.png"
        path.write_bytes(encode_image(img, "png"))
    print(f"wrote {args.count} phantoms to {args.out}")


if __name__ == "__main__":
    main()

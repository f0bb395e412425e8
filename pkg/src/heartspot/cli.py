"""Batch command line front end.

Subcommands: ``mask`` materializes a sampling mask, ``compress`` /
``decompress`` move images in and out of .hspt packets, ``explain`` turns a
saved attribution vector into a heatmap, and ``stats`` prints the
IMR/ODR table for every method on one image.

Exit codes are a stable contract for scripting: 0 success, 1 per-file or
I/O failure, 2 usage, 3 integrity, 4 format, 5 shape.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .codec import (
    decode_packet,
    encode_masked_jpeg,
    encode_packet,
    imr,
    odr,
)
from .errors import DecodeError, FormatError, IntegrityError, ShapeError
from .explain import attribution_to_image, load_attribution, render_heatmap, smooth_attribution
from .imaging import center_crop, decode_image, encode_image
from .pooling import PoolSpec, pooled_extent
from .priors import PriorSpec, generate_mask, load_heart_reference, mask_to_png

METHODS = ("hline", "rline", "heart", "lines+heart", "mp+lines+heart", "mp+hline")

# method -> (use_hline, use_rline, use_heart, use_mp)
_METHOD_FLAGS = {
    "hline": (True, False, False, False),
    "rline": (False, True, False, False),
    "heart": (False, False, True, False),
    "lines+heart": (True, True, True, False),
    "mp+lines+heart": (True, True, True, True),
    "mp+hline": (True, False, False, True),
}

_IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}

_CONFIG_KEYS = {
    "method", "seed", "crop", "heart_mask", "n_lines",
    "hline_range", "mp", "jobs", "out", "format",
}


@dataclass
class RunConfig:
    """Resolved settings for one invocation.

    ``hline_range`` of None means "method default": rows 100:300:10 on the
    full grid, or 50:150:5 once pooling has halved it.
    """

    method: str = "hline"
    seed: int = 0
    crop_side: int = 320
    heart_mask_path: str | None = None
    n_lines: int = 200
    hline_range: tuple[int, int, int] | None = None
    mp: tuple[int, int] = (12, 2)
    jobs: int = 1
    output_dir: str = "."
    fmt: str = "text"


def _parse_range(text: str) -> tuple[int, int, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"expected START:STOP:STEP, got {text!r}")
    return int(parts[0]), int(parts[1]), int(parts[2])


def _parse_mp(text: str) -> tuple[int, int]:
    parts = text.split(":")
    if len(parts) != 2:
        raise ValueError(f"expected K:S, got {text!r}")
    return int(parts[0]), int(parts[1])


def _read_config_file(path: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, value = line.split("=", 1)
        pairs[key.strip()] = value.strip()
    unknown = sorted(set(pairs) - _CONFIG_KEYS)
    if unknown:
        raise ValueError(f"{path}: unknown config key(s): {', '.join(unknown)}")
    return pairs


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge flags over config-file entries over environment over defaults."""
    pairs = _read_config_file(args.config) if args.config else {}

    def pick(flag_name, key, convert, fallback):
        value = getattr(args, flag_name)
        if value is not None:
            return value
        if key in pairs:
            return convert(pairs[key])
        return fallback

    seed = args.seed
    if seed is None and "seed" in pairs:
        seed = int(pairs["seed"])
    if seed is None and "HEARTSPOT_SEED" in os.environ:
        seed = int(os.environ["HEARTSPOT_SEED"])
    if seed is None:
        seed = 0

    method = pick("method", "method", str, "hline")
    if method not in _METHOD_FLAGS:
        raise ValueError(f"unknown method {method!r}; choose from: {', '.join(METHODS)}")
    fmt = pick("format", "format", str, "text")
    if fmt not in ("text", "json"):
        raise ValueError(f"output format must be text or json, got {fmt!r}")
    config = RunConfig(
        method=method,
        seed=seed,
        crop_side=pick("crop", "crop", int, 320),
        heart_mask_path=pick("heart_mask", "heart_mask", str, None),
        n_lines=pick("n_lines", "n_lines", int, 200),
        hline_range=pick("hline_range", "hline_range", _parse_range, None),
        mp=pick("mp", "mp", _parse_mp, (12, 2)),
        jobs=pick("jobs", "jobs", int, 1),
        output_dir=pick("out", "out", str, "."),
        fmt=fmt,
    )
    if config.crop_side < 1:
        raise ValueError(f"crop side must be positive, got {config.crop_side}")
    if config.jobs < 1:
        raise ValueError(f"worker count must be >= 1, got {config.jobs}")
    return config


def build_spec(config: RunConfig, method: str | None = None):
    """Turn a RunConfig into a (PriorSpec, heart reference) pair.

    Disabled methods keep canonical default fields so the PriorSpec survives a
    header round trip unchanged. The mask grid is the post-pooling grid for
    mp methods.
    """
    method = config.method if method is None else method
    use_hline, use_rline, use_heart, use_mp = _METHOD_FLAGS[method]
    heart = None
    heart_hash = b"\x00" * 32
    if use_heart:
        if config.heart_mask_path is None:
            raise ValueError(f"method {method!r} needs --heart-mask (a grayscale saliency PNG)")
        heart = load_heart_reference(config.heart_mask_path)
        heart_hash = heart.digest
    mp = PoolSpec(k=config.mp[0], s=config.mp[1], q=0.5) if use_mp else None
    grid = pooled_extent(config.crop_side, mp.s) if mp else config.crop_side
    if use_hline:
        if config.hline_range is not None:
            start, stop, step = config.hline_range
        elif mp is not None:
            start, stop, step = 50, 150, 5
        else:
            start, stop, step = 100, 300, 10
    else:
        start, stop, step = 0, 0, 1
    spec = PriorSpec(
        height=grid,
        width=grid,
        use_hline=use_hline,
        hline_start=start,
        hline_stop=stop,
        hline_step=step,
        use_rline=use_rline,
        n_lines=config.n_lines if use_rline else 0,
        seed=config.seed if use_rline else 0,
        use_heart=use_heart,
        heart_hash=heart_hash,
        mp=mp,
    )
    return spec, heart


def _ensure_dir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_mask(config: RunConfig) -> int:
    spec, heart = build_spec(config)
    mask = generate_mask(spec, heart)
    out = _ensure_dir(config.output_dir)
    png_path = out / "mask.png"
    png_path.write_bytes(mask_to_png(mask))
    original = config.crop_side * config.crop_side
    sidecar = {
        "method": config.method,
        "height": mask.height,
        "width": mask.width,
        "popcount": mask.popcount,
        "imr": imr(mask, original),
    }
    (out / "mask.json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    print(f"wrote {png_path} ({mask.popcount} kept pixels)")
    return 0


def _image_paths(target: Path) -> list[Path]:
    if target.is_dir():
        paths = sorted(p for p in target.iterdir() if p.suffix.lower() in _IMAGE_SUFFIXES)
        if not paths:
            raise ValueError(f"no .png/.jpg images found in {target}")
        return paths
    return [target]


def cmd_compress(args: argparse.Namespace, config: RunConfig) -> int:
    spec, heart = build_spec(config)
    mask = generate_mask(spec, heart)
    original = config.crop_side * config.crop_side
    out = _ensure_dir(config.output_dir)
    paths = _image_paths(Path(args.input))

    def work(path: Path) -> dict:
        data = path.read_bytes()
        img = center_crop(decode_image(data), config.crop_side)
        packet = encode_packet(img, spec, heart)
        (out / (path.stem + ".hspt")).write_bytes(packet)
        reference = encode_image(img, fmt="jpeg", quality=95)
        return {
            "file": path.name,
            "imr": imr(mask, original),
            "odr": odr(len(packet), len(reference)),
            "bytes_in": len(data),
            "bytes_out": len(packet),
        }

    records: list[dict] = []
    failures: list[dict] = []
    with ThreadPoolExecutor(max_workers=config.jobs) as pool:
        futures = [(path, pool.submit(work, path)) for path in paths]
        for path, future in futures:
            try:
                records.append(future.result())
            except Exception as exc:
                failures.append({"file": path.name, "error": f"{type(exc).__name__}: {exc}"})
    aggregate = None
    if records:
        aggregate = {
            "imr": sum(r["imr"] for r in records) / len(records),
            "odr": sum(r["odr"] for r in records) / len(records),
            "bytes_in": sum(r["bytes_in"] for r in records),
            "bytes_out": sum(r["bytes_out"] for r in records),
        }
    stats = {
        "method": config.method,
        "seed": config.seed,
        "files": records,
        "failures": failures,
        "aggregate": aggregate,
    }
    (out / "stats.json").write_text(json.dumps(stats, indent=2, sort_keys=True) + "\n")
    print(f"compressed {len(records)}/{len(paths)} image(s) into {out}")
    for failure in failures:
        print(f"  failed: {failure['file']}: {failure['error']}", file=sys.stderr)
    return 1 if failures else 0


def cmd_decompress(args: argparse.Namespace, config: RunConfig) -> int:
    packet_path = Path(args.packet)
    heart = load_heart_reference(config.heart_mask_path) if config.heart_mask_path else None
    sparse, _, _ = decode_packet(packet_path.read_bytes(), heart)
    out = _ensure_dir(config.output_dir)
    dest = out / (packet_path.stem + ".png")
    dest.write_bytes(encode_image(sparse, fmt="png"))
    print(f"wrote {dest}")
    return 0


def cmd_explain(args: argparse.Namespace, config: RunConfig) -> int:
    packet_path = Path(args.packet)
    heart = load_heart_reference(config.heart_mask_path) if config.heart_mask_path else None
    _, mask, _ = decode_packet(packet_path.read_bytes(), heart)
    attr = load_attribution(args.attribution)
    sparse = attribution_to_image(attr, mask)
    heat = smooth_attribution(sparse)
    out = _ensure_dir(config.output_dir)
    dest = out / (packet_path.stem + ".heatmap.png")
    dest.write_bytes(render_heatmap(heat))
    print(f"wrote {dest}")
    return 0


def cmd_stats(args: argparse.Namespace, config: RunConfig) -> int:
    img = center_crop(decode_image(Path(args.input).read_bytes()), config.crop_side)
    reference = encode_image(img, fmt="jpeg", quality=95)
    original = config.crop_side * config.crop_side
    rows = []
    for method in METHODS:
        spec, heart = build_spec(config, method=method)
        mask = generate_mask(spec, heart)
        if method == "heart":
            # The contiguous heart region compresses better as a masked JPEG
            # than as a packed flat vector, so its on-disk size is measured
            # that way.
            blob = encode_masked_jpeg(img, mask, quality=95)
        else:
            blob = encode_packet(img, spec, heart)
        rows.append({
            "method": method,
            "imr": round(imr(mask, original), 4),
            "odr": round(odr(len(blob), len(reference)), 4),
        })
    if config.fmt == "json":
        print(json.dumps({"input": Path(args.input).name, "rows": rows}, indent=2))
    else:
        print(f"{'method':<16} {'imr':>8} {'odr':>8}")
        for row in rows:
            print(f"{row['method']:<16} {row['imr']:>8.4f} {row['odr']:>8.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--method", choices=METHODS, default=None,
                        help="sampling method (default hline)")
    shared.add_argument("--seed", type=int, default=None,
                        help="random-line seed (default: $HEARTSPOT_SEED or 0)")
    shared.add_argument("--crop", type=int, default=None, metavar="SIDE",
                        help="center-crop side in pixels (default 320)")
    shared.add_argument("--heart-mask", dest="heart_mask", default=None, metavar="PNG",
                        help="grayscale saliency PNG for heart methods")
    shared.add_argument("--n-lines", dest="n_lines", type=int, default=None,
                        help="random line count (default 200)")
    shared.add_argument("--hline-range", dest="hline_range", type=_parse_range,
                        default=None, metavar="START:STOP:STEP",
                        help="row band (default 100:300:10, or 50:150:5 with pooling)")
    shared.add_argument("--mp", type=_parse_mp, default=None, metavar="K:S",
                        help="median-pooling kernel and stride (default 12:2)")
    shared.add_argument("--jobs", type=int, default=None,
                        help="parallel workers for batch compression (default 1)")
    shared.add_argument("--out", default=None, metavar="DIR",
                        help="output directory (default .)")
    shared.add_argument("--format", choices=("text", "json"), default=None,
                        help="stats output format (default text)")
    shared.add_argument("--config", default=None, metavar="FILE",
                        help="key=value settings file; explicit flags win over it")

    parser = argparse.ArgumentParser(
        prog="heartspot",
        description="Learning-free sparse compression of chest X-rays via spatial priors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("mask", parents=[shared],
                   help="write the sampling mask as PNG plus a JSON sidecar")

    p = sub.add_parser("compress", parents=[shared],
                       help="pack an image or directory of images into .hspt files")
    p.add_argument("input", help="image file or directory of .png/.jpg files")

    p = sub.add_parser("decompress", parents=[shared],
                       help="rebuild the sparse image from a packet")
    p.add_argument("packet", help=".hspt file")

    p = sub.add_parser("explain", parents=[shared],
                       help="render an attribution vector over a packet as a heatmap")
    p.add_argument("packet", help=".hspt file")
    p.add_argument("attribution", help="little-endian float32 file, one value per kept pixel")

    p = sub.add_parser("stats", parents=[shared],
                       help="print the per-method IMR/ODR table for one image")
    p.add_argument("input", help="image file")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = resolve_config(args)
        if args.command == "mask":
            return cmd_mask(config)
        if args.command == "compress":
            return cmd_compress(args, config)
        if args.command == "decompress":
            return cmd_decompress(args, config)
        if args.command == "explain":
            return cmd_explain(args, config)
        return cmd_stats(args, config)
    except IntegrityError as exc:
        print(f"heartspot: integrity error: {exc}", file=sys.stderr)
        return 3
    except FormatError as exc:
        print(f"heartspot: format error: {exc}", file=sys.stderr)
        return 4
    except ShapeError as exc:
        print(f"heartspot: shape error: {exc}", file=sys.stderr)
        return 5
    except DecodeError as exc:
        print(f"heartspot: decode error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"heartspot: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"heartspot: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    raise SystemExit(main(sys.argv[1:]))


if __name__ == "__main__":
    run()

"""End-to-end acceptance gates.

Each test prints one PASS/FAIL line (run with ``pytest -s`` to see them all)
and asserts the stated bound, so the suite doubles as a checklist of the
toolkit's headline guarantees.
"""

import math

import numpy as np
import scipy.stats

from heartspot.cli import main as cli_main
from heartspot.codec import decode_packet, encode_packet, flatten, imr, odr
from heartspot.imaging import decode_image, encode_image
from heartspot.pooling import PoolSpec, median_pool, quantile_pool
from heartspot.priors import (
    PriorSpec,
    combine_masks,
    generate_mask,
    heart_mask_from_saliency,
    heart_reference_from_bytes,
    hline_mask,
    rline_mask,
    sample_circle_pair,
    synthetic_heart_saliency,
)
from heartspot.rng import Pcg32
from oracles import line_oracle, pool_oracle_sorted_windows

ORIGINAL_PIXELS = 102400


def check(name: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f"  ({detail})"
    print(line)
    assert ok, line


def test_hline_exact_count():
    mask = hline_mask(320, 320, 100, 300, 10)
    vec = flatten(np.zeros((320, 320), dtype=np.uint8), mask)
    ratio = imr(mask, ORIGINAL_PIXELS)
    check(
        "row-band mask keeps exactly 6400 pixels (ratio 0.0625)",
        vec.shape == (6400,) and ratio == 0.0625,
        f"len={vec.shape[0]}, imr={ratio}",
    )


def test_pooled_hline_exact_count():
    pooled = median_pool(np.zeros((320, 320), dtype=np.uint8), k=12, s=2)
    mask = hline_mask(pooled.shape[0], pooled.shape[1], 50, 150, 5)
    ratio = imr(mask, ORIGINAL_PIXELS)
    check(
        "pooled row-band mask keeps exactly 3200 pixels (ratio 0.03125)",
        pooled.shape == (160, 160) and mask.popcount == 3200 and ratio == 0.03125,
        f"grid={pooled.shape}, popcount={mask.popcount}, imr={ratio}",
    )


def test_random_line_ratio_window():
    ratios = [rline_mask(320, 320, 200, seed).popcount / ORIGINAL_PIXELS for seed in range(10)]
    mean = sum(ratios) / len(ratios)
    check(
        "200 random lines keep 24-32% of pixels (mean over 10 seeds)",
        0.24 <= mean <= 0.32,
        f"mean={mean:.4f}, min={min(ratios):.4f}, max={max(ratios):.4f}",
    )


def test_combined_ratio_window():
    heart = heart_mask_from_saliency(synthetic_heart_saliency(320, 320))
    hline = hline_mask(320, 320, 100, 300, 10)
    ratios = []
    for seed in range(10):
        combined = combine_masks(
            hline=hline, rline=rline_mask(320, 320, 200, seed), heart=heart
        )
        ratios.append(combined.popcount / ORIGINAL_PIXELS)
    mean = sum(ratios) / len(ratios)
    check(
        "(rows | lines) & heart keeps 12-22% of pixels (mean over 10 seeds)",
        0.12 <= mean <= 0.22,
        f"mean={mean:.4f}, heart coverage={heart.popcount / heart.bits.size:.4f}",
    )


def test_disk_ratio_ordering_on_phantoms(phantom_dir):
    plain = PriorSpec(
        height=320, width=320, use_hline=True,
        hline_start=100, hline_stop=300, hline_step=10,
    )
    pooled = PriorSpec(
        height=160, width=160, use_hline=True,
        hline_start=50, hline_stop=150, hline_step=5,
        mp=PoolSpec(k=12, s=2, q=0.5),
    )
    odr_plain, odr_pooled = [], []
    for path in sorted(phantom_dir.glob("*.png")):
        img = decode_image(path.read_bytes())
        jpeg_len = len(encode_image(img, "jpeg", quality=95))
        odr_plain.append(odr(len(encode_packet(img, plain)), jpeg_len))
        odr_pooled.append(odr(len(encode_packet(img, pooled)), jpeg_len))
    mean_plain = sum(odr_plain) / len(odr_plain)
    mean_pooled = sum(odr_pooled) / len(odr_pooled)
    check(
        "on-disk ratios: pooled rows < plain rows < 1, pooled rows < 0.20",
        mean_pooled < mean_plain < 1.0 and mean_pooled < 0.20,
        f"pooled={mean_pooled:.4f}, plain={mean_plain:.4f}, n={len(odr_plain)}",
    )


def test_lossless_round_trip_all_methods(heart_png_bytes):
    heart = heart_reference_from_bytes(heart_png_bytes)
    mp = PoolSpec(k=12, s=2, q=0.5)
    specs = {
        "hline": PriorSpec(
            height=320, width=320, use_hline=True,
            hline_start=100, hline_stop=300, hline_step=10,
        ),
        "rline": PriorSpec(height=320, width=320, use_rline=True, n_lines=200, seed=1),
        "heart": PriorSpec(
            height=320, width=320, use_heart=True, heart_hash=heart.digest,
        ),
        "lines+heart": PriorSpec(
            height=320, width=320,
            use_hline=True, hline_start=100, hline_stop=300, hline_step=10,
            use_rline=True, n_lines=200, seed=1,
            use_heart=True, heart_hash=heart.digest,
        ),
        "mp+lines+heart": PriorSpec(
            height=160, width=160,
            use_hline=True, hline_start=50, hline_stop=150, hline_step=5,
            use_rline=True, n_lines=200, seed=1,
            use_heart=True, heart_hash=heart.digest, mp=mp,
        ),
        "mp+hline": PriorSpec(
            height=160, width=160, use_hline=True,
            hline_start=50, hline_stop=150, hline_step=5, mp=mp,
        ),
    }
    rng = np.random.default_rng(2718)
    failures = 0
    for i in range(50):
        img = rng.integers(0, 256, (320, 320), dtype=np.uint8)
        for name, spec in specs.items():
            sparse, mask, _ = decode_packet(encode_packet(img, spec, heart), heart)
            pooled = median_pool(img, mp.k, mp.s) if spec.mp else img
            if not np.array_equal(sparse[mask.bits], pooled[mask.bits]):
                failures += 1
    check(
        "all 6 methods round-trip 50 random images bit-exactly",
        failures == 0,
        f"{50 * len(specs)} packets, {failures} mismatches",
    )


def test_pooling_matches_bruteforce_oracle():
    rng = np.random.default_rng(31415)
    mismatches = 0
    for _ in range(200):
        img = rng.integers(0, 256, (16, 16), dtype=np.uint8)
        for k in (1, 2, 3, 5):
            for s in (1, 2):
                wins = pool_oracle_sorted_windows(img, k, s)
                for q in (0.0, 0.5, 0.9, 1.0):
                    rank = math.floor(q * (k * k - 1))
                    want = [[w[rank] for w in row] for row in wins]
                    got = quantile_pool(img, PoolSpec(k=k, s=s, q=q))
                    if got.tolist() != want:
                        mismatches += 1
    check(
        "quantile pooling matches brute-force oracle on 200 random 16x16 images",
        mismatches == 0,
        f"k in (1,2,3,5) x s in (1,2) x q in (0,0.5,0.9,1), {mismatches} mismatches",
    )


def test_rasterizer_matches_reference_exhaustively():
    from heartspot.priors import bresenham_line

    span = range(-8, 9)
    pairs = 0
    mismatches = 0
    for r0 in span:
        for c0 in span:
            for r1 in span:
                for c1 in span:
                    if (r0, c0) == (r1, c1):
                        continue
                    pairs += 1
                    if bresenham_line((r0, c0), (r1, c1), 8, 8) != line_oracle(
                        (r0, c0), (r1, c1), 8, 8
                    ):
                        mismatches += 1
    check(
        "line rasterizer matches exact-arithmetic reference on all [-8,8]^2 pairs",
        mismatches == 0,
        f"{pairs} endpoint pairs, {mismatches} mismatches",
    )


def test_circle_sampler_statistics():
    rng = Pcg32(1234)
    nbins = 16
    n = 100_000
    counts = {"left": [0] * nbins, "right": [0] * nbins}
    worst_norm = 0.0
    half_ok = True
    for _ in range(n):
        pair = sample_circle_pair(rng)
        half_ok &= pair.left[0] <= 0.0 and pair.right[0] >= 0.0
        for side, (x, y) in (("left", pair.left), ("right", pair.right)):
            worst_norm = max(worst_norm, abs(math.hypot(x, y) - 1.0))
            # map each half-circle onto (-pi/2, pi/2) and bin uniformly
            ang = math.atan2(y, -x if side == "left" else x)
            idx = int((ang + math.pi / 2) / math.pi * nbins)
            counts[side][min(max(idx, 0), nbins - 1)] += 1
    expected = n / nbins
    chis = {
        side: sum((c - expected) ** 2 / expected for c in cs)
        for side, cs in counts.items()
    }
    crit = scipy.stats.chi2.ppf(0.99, nbins - 1)
    check(
        "100k circle pairs: unit norms, correct halves, uniform angles (chi2 @ 1%)",
        half_ok
        and worst_norm <= 1e-9
        and chis["left"] < crit
        and chis["right"] < crit,
        f"worst norm err={worst_norm:.2e}, chi2 left={chis['left']:.2f} "
        f"right={chis['right']:.2f} crit={crit:.2f}",
    )


def test_packet_bytes_deterministic(tmp_path, phantom_dir, heart_png_file):
    runs = {}
    for label, jobs in (("a1", "1"), ("b8", "8"), ("c8", "8")):
        out = tmp_path / label
        code = cli_main([
            "compress", str(phantom_dir), "--method", "mp+lines+heart",
            "--heart-mask", str(heart_png_file), "--seed", "12",
            "--jobs", jobs, "--out", str(out),
        ])
        assert code == 0
        runs[label] = {p.name: p.read_bytes() for p in sorted(out.glob("*.hspt"))}
    identical = runs["a1"] == runs["b8"] == runs["c8"] and len(runs["a1"]) == 20
    check(
        "packet bytes identical across repeat runs and jobs=1 vs jobs=8",
        identical,
        f"{len(runs['a1'])} packets per run",
    )

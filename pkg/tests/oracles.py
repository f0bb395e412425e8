"""Brute-force reference implementations the fast code is checked against.

Everything here favors obviousness over speed: python loops, exact integer
arithmetic, index clamping instead of padding, sorted() instead of
selection. Nothing imports from the package's pooling or rasterization
internals beyond their public entry points.
"""

import math


def pool_oracle_sorted_windows(img, k, s):
    """Per output pixel, the ascending sort of its k*k window.

    Same-geometry windows: ceil(H/s) outputs per axis, with out-of-range
    indices clamped to the border (equivalent to replicate padding split
    floor(pad/2) on the leading side).
    """
    H, W = img.shape
    out_h = -(-H // s)
    out_w = -(-W // s)
    lead_h = max(0, (out_h - 1) * s + k - H) // 2
    lead_w = max(0, (out_w - 1) * s + k - W) // 2
    rows = []
    for i in range(out_h):
        row = []
        for j in range(out_w):
            vals = []
            for a in range(k):
                for b in range(k):
                    r = min(max(i * s - lead_h + a, 0), H - 1)
                    c = min(max(j * s - lead_w + b, 0), W - 1)
                    vals.append(img[r, c])
            vals.sort()
            row.append(vals)
        rows.append(row)
    return rows


def pool_oracle(img, k, s, q):
    """Nearest-rank quantile pool via the sorted-window oracle."""
    rank = math.floor(q * (k * k - 1))
    wins = pool_oracle_sorted_windows(img, k, s)
    return [[w[rank] for w in row] for row in wins]


def line_oracle(p0, p1, height, width):
    """Nearest-integer rasterization along the major axis, exact arithmetic.

    The minor coordinate is the exact linear interpolation at each major
    step, rounded to the nearest integer; exact half-step ties round toward
    the destination's minor direction. Only in-raster pixels are kept, in
    walk order.
    """
    (r0, c0), (r1, c1) = p0, p1
    dr, dc = r1 - r0, c1 - c0
    pts = []
    if abs(dc) >= abs(dr):
        step = 1 if dc > 0 else -1
        for c in range(c0, c1 + step, step):
            num = (c - c0) * dr
            den = dc
            if den < 0:
                num, den = -num, -den
            base = num // den
            rem = num - base * den
            if 2 * rem < den:
                r = r0 + base
            elif 2 * rem > den:
                r = r0 + base + 1
            else:
                r = r0 + base + (1 if dr > 0 else 0)
            if 0 <= r < height and 0 <= c < width:
                pts.append((r, c))
    else:
        step = 1 if dr > 0 else -1
        for r in range(r0, r1 + step, step):
            num = (r - r0) * dc
            den = dr
            if den < 0:
                num, den = -num, -den
            base = num // den
            rem = num - base * den
            if 2 * rem < den:
                c = c0 + base
            elif 2 * rem > den:
                c = c0 + base + 1
            else:
                c = c0 + base + (1 if dc > 0 else 0)
            if 0 <= r < height and 0 <= c < width:
                pts.append((r, c))
    return pts

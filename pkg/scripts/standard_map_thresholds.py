"""Locate the standard-map kick strengths where the simple and refined
criteria first rule out invariant curves through x = 0, and compare with a
sampled-orbit version of the refined test.

    python3 scripts/standard_map_thresholds.py --samples 256
"""

import argparse
import math

import numpy as np

from tennis_kam.criteria import (
    ab_along_orbit,
    d_bounds,
    estimate_bc,
    records_from_positions,
    refined_criterion,
    simple_criterion,
)
from tennis_kam.reference import StandardMap


def margin_at_zero(k: float, refined: bool) -> float:
    m = StandardMap(k)
    rec = [ab_along_orbit(m, (m.inverse(0.0, 0.5)[0], 0.0, m.step(0.0, 0.5)[0]))]
    if not refined:
        return simple_criterion(rec).margin
    return refined_criterion(rec, d_bounds(2 + k, 2 + k, 1.0, 1.0)).margin


def boundary(refined: bool, lo=0.1, hi=5.0, tol=1e-12) -> float:
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if margin_at_zero(mid, refined) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sampled_margin(k: float, samples: int) -> float:
    """Refined margin with B, C estimated from a grid of a, b samples (safety factors on)."""
    m = StandardMap(k)
    x = np.arange(samples) * 2 * math.pi / samples
    recs = records_from_positions(m, np.concatenate([[x[0] - 1.0], x, [x[-1] + 1.0]]))
    return refined_criterion(recs, d_bounds(*estimate_bc(recs))).margin


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=256)
    args = ap.parse_args()
    print(f"simple boundary   k = {boundary(False):.12f}   (expected 2)")
    print(f"refined boundary  k = {boundary(True):.12f}   (expected 4/3 = {4 / 3:.12f})")
    print("\n    k   simple margin   refined margin (sampled B, C)")
    for k in (0.5, 1.0, 1.25, 4 / 3, 1.4, 2.0, 3.0):
        print(f"{k:6.3f}  {margin_at_zero(k, False):+.6f}       {sampled_margin(k, args.samples):+.6f}")


if __name__ == "__main__":
    main()

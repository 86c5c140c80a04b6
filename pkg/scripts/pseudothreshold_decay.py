#!/usr/bin/env python3
"""Pseudothreshold decay with circuit depth.

For each depth parameter D, finds the noise rate where the d=5 two-block
Bell curve crosses the d=3 one (exact evaluation on a log grid), then fits
log p*(D) linearly to report the decay rate per unit depth.
"""

import argparse

import numpy as np

from qedet.experiments import estimate_pseudothreshold


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depths", type=int, nargs="+",
                    default=[0, 2, 4, 6, 8, 10, 12])
    ap.add_argument("--grid-lo", type=float, default=0.002)
    ap.add_argument("--grid-hi", type=float, default=0.12)
    ap.add_argument("--grid-points", type=int, default=120)
    ap.add_argument("--method", choices=["pair", "vs_physical"],
                    default="pair")
    args = ap.parse_args()

    grid = list(np.geomspace(args.grid_lo, args.grid_hi, args.grid_points))
    items = [(3, 5)] if args.method == "pair" else [3]

    stars = []
    print(f"{'D':>3} {'p*':>10}")
    for depth in args.depths:
        r = estimate_pseudothreshold(depth, items, grid, family="color",
                                     method=args.method)
        stars.append(r.p_star)
        print(f"{depth:>3} {r.p_star:>10.6f}")

    slope, intercept = np.polyfit(args.depths, np.log(stars), 1)
    fitted = intercept + slope * np.array(args.depths)
    resid = np.log(stars) - fitted
    r2 = 1 - np.sum(resid**2) / np.sum((np.log(stars) - np.mean(np.log(stars)))**2)
    print(f"\nlog-linear fit: p* ~ {np.exp(intercept):.5f} * "
          f"exp({slope:+.4f} * D), R^2 = {r2:.3f}")


if __name__ == "__main__":
    main()

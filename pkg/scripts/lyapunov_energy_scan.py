"""Largest Lyapunov exponent of tennis orbits against starting energy, next
to the same quantity for the flat racket, where shear alone gives
a finite-time value decaying like log(n)/n.

    python3 scripts/lyapunov_energy_scan.py --steps 100000
"""

import argparse

import numpy as np

from tennis_kam.explorer import lyapunov_max
from tennis_kam.profile import RacketProfile
from tennis_kam.reference import TennisSystem
from tennis_kam.tennis import TennisParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--amplitude", type=float, default=0.01)
    ap.add_argument("--steps", type=int, default=100000)
    ap.add_argument("--energies", type=float, nargs="+", default=[5, 20, 50, 200, 1000])
    ap.add_argument("--phases", type=int, default=4)
    args = ap.parse_args()
    wavy = TennisSystem(TennisParams(RacketProfile.cosine(args.amplitude)))
    flat = TennisSystem(TennisParams(RacketProfile(), v_star=1.0))
    print(f"{'e0':>8} {'lambda (mean over phases)':>26} {'max':>10} {'flat':>10}")
    for e0 in args.energies:
        lams = [lyapunov_max(wavy, (t0, e0), args.steps).value
                for t0 in np.linspace(0, 1, args.phases, endpoint=False)]
        lam0 = lyapunov_max(flat, (0.1, e0), args.steps).value
        print(f"{e0:8.1f} {np.mean(lams):26.5f} {np.max(lams):10.5f} {lam0:10.2e}")


if __name__ == "__main__":
    main()

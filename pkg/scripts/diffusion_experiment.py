"""Energy oscillation of tennis orbits started in a band, as the orbit length
grows. The default racket f = 0.01 cos(2 pi t), g = 1 satisfies the main
condition, so no invariant curve blocks the energy above a threshold.

    python3 scripts/diffusion_experiment.py --grid 20 --steps 1000 10000 100000
"""

import argparse

import numpy as np

from tennis_kam.explorer import EnsembleSpec, ensemble_run, single_step_bound
from tennis_kam.profile import RacketProfile, check_main_condition
from tennis_kam.reference import TennisSystem
from tennis_kam.tennis import TennisParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--amplitude", type=float, default=0.01)
    ap.add_argument("--g", type=float, default=1.0)
    ap.add_argument("--grid", type=int, default=20, help="orbits per axis")
    ap.add_argument("--e-range", type=float, nargs=2, default=(50.0, 60.0))
    ap.add_argument("--steps", type=int, nargs="+", default=[1000, 10000, 100000])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    p = TennisParams(RacketProfile.cosine(args.amplitude), g=args.g)
    cond = check_main_condition(p.norms, p.g)
    bound = single_step_bound(p.norms, args.e_range[1])
    print(f"main condition holds: {cond.holds} (margin {cond.margin:+.5f})")
    print(f"single-step energy bound at e = {args.e_range[1]:g}: {bound:.4f}")
    print(f"{'steps':>8} {'max osc':>10} {'x bound':>8} {'median':>10} {'absorbed':>9}")
    system = TennisSystem(p)
    for n in args.steps:
        spec = EnsembleSpec(args.grid, args.grid, tuple(args.e_range), n, args.seed)
        stats = ensemble_run(system, spec)
        osc = np.array([s.sup_minus_inf for s in stats])
        absorbed = sum(s.absorbed for s in stats)
        print(f"{n:8d} {osc.max():10.2f} {osc.max() / bound:8.1f} {np.median(osc):10.2f} {absorbed:9d}")


if __name__ == "__main__":
    main()

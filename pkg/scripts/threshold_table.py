"""Energy thresholds above which no rotational invariant curve exists, for
rackets f(t) = A cos(2 pi t) over a range of amplitudes.

    python3 scripts/threshold_table.py --g 1 --amplitudes 0.005 0.01 0.05 0.1 0.2
"""

import argparse

from tennis_kam.criteria import tennis_thresholds
from tennis_kam.profile import RacketProfile, check_main_condition, check_pustylnikov
from tennis_kam.tennis import TennisParams


def fmt(x):
    return "-" if x is None else f"{x:12.4f}"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--g", type=float, default=1.0)
    ap.add_argument("--amplitudes", type=float, nargs="+", default=[0.005, 0.01, 0.02, 0.05, 0.1, 0.2])
    args = ap.parse_args()
    print(f"{'A':>7} {'v_star':>8} {'main':>5} {'pust':>5} {'e*_simple':>12} {'e*_refined':>12}")
    for amp in args.amplitudes:
        p = TennisParams(RacketProfile.cosine(amp), g=args.g)
        rep = tennis_thresholds(p.norms, p.g, p.v_star)
        main_ok = check_main_condition(p.norms, p.g).holds
        pust = check_pustylnikov(p.norms, p.g).holds
        print(f"{amp:7.3f} {p.v_star:8.4f} {str(main_ok):>5} {str(pust):>5} "
              f"{fmt(rep.e_star_simple)} {fmt(rep.e_star_refined)}")
    print(f"\nnote: {rep.surrogate_note}")


if __name__ == "__main__":
    main()

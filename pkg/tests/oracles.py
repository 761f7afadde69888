"""Independent reference computations used as test oracles."""

import math

import numpy as np


def first_root_oracle(params, t, w, samples_per_unit=4000):
    """Independent bounce-time oracle: dense sign scan of F plus brentq.

    F(d) = f(t) - f(t + d) + w d - g d^2 / 2, scanned from d = 0 on a fine grid.
    """
    from scipy.optimize import brentq

    prof, g = params.profile, params.g
    f0 = prof(t)

    def F(d):
        return f0 - prof(t + d) + w * d - 0.5 * g * d * d

    from tennis_kam.profile import eval_array

    hi = 2.0 * (w + params.norms.sup_df) / g + 1.0
    n = int(hi * samples_per_unit) + 10
    grid = np.linspace(0.0, hi, n)
    d = grid[1:]
    vals = f0 - eval_array(prof, t + d, 0) + w * d - 0.5 * g * d * d
    idx = int(np.argmax(vals <= 0.0))
    a, b = grid[idx], grid[idx + 1]
    if F(b) == 0.0:
        return b
    return brentq(F, a, b, xtol=1e-15, rtol=1e-15, maxiter=200)


def rel_close(a, b, rtol):
    return abs(a - b) <= rtol * max(1.0, abs(a), abs(b))


TWO_PI = 2.0 * math.pi

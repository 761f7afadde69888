"""Compiled orbit integrators for long runs and ensembles.

Same bounce-time algorithm as ``tennis._solve_delta``; when g > sup|f''| the
residual F(d) is strictly concave with F(0) = 0 and F'(0) = v > 0, so the
positive root is unique and the march/interior check is skipped.
"""

import math

import numpy as np
from numba import njit

OK = 0
SOLVER_FAILED = 1
_EPS = 2.220446049250313e-16
_TWO_PI = 2.0 * math.pi


@njit(cache=True)
def _eval(ws, cs, ss, mean, x):
    tau = x - math.floor(x)
    f = mean
    df = 0.0
    ddf = 0.0
    for i in range(ws.shape[0]):
        w = ws[i]
        cw = math.cos(w * tau)
        sw = math.sin(w * tau)
        a = cs[i] * cw + ss[i] * sw
        b = -cs[i] * sw + ss[i] * cw
        f += a
        df += w * b
        ddf -= w * w * a
    return f, df, ddf


@njit(cache=True)
def _resid(ws, cs, ss, mean, g, f0, tau, w, d):
    return f0 - _eval(ws, cs, ss, mean, tau + d)[0] + w * d - 0.5 * g * d * d


@njit(cache=True)
def _newton(ws, cs, ss, mean, g, f0, tau, w, a, b, x):
    """Safeguarded Newton on F(d) = f0 - f(tau + d) + w d - g d^2 / 2 over [a, b].

    One profile evaluation per iteration. Stops after an accepted Newton step
    below 1e-9 relative: with quadratic convergence the remaining error is
    below one ulp. Returns (root, |F(root)|, f(tau + root), f'(tau + root)).
    """
    done = False
    fx = 0.0
    f1 = 0.0
    df1 = 0.0
    for _ in range(200):
        f1, df1, _ = _eval(ws, cs, ss, mean, tau + x)
        fx = f0 - f1 + w * x - 0.5 * g * x * x
        if fx == 0.0 or done:
            break
        if fx > 0.0:
            a = x
        else:
            b = x
        dfx = w - g * x - df1
        newton = dfx != 0.0
        xn = x - fx / dfx if newton else 0.5 * (a + b)
        if not (a < xn < b):
            xn = 0.5 * (a + b)
            newton = False
        done = (newton and abs(xn - x) <= 1e-9 * abs(x)) or b - a <= 4.0 * _EPS * abs(b)
        x = xn
    return x, abs(fx), f1, df1


@njit(cache=True)
def flight_time(ws, cs, ss, mean, g, sup_df, sup_ddf, march_step, root_tol, tau, w):
    """Flight time for launch phase tau and inertial speed w.

    Returns (delta, residual, status, f(tau + delta), f'(tau + delta)).
    """
    f0, df0, _ = _eval(ws, cs, ss, mean, tau)
    v = w - df0
    lower = max(2.0 * (w - sup_df) / g, 2.0 * v / (g + sup_ddf))
    upper = 2.0 * (w + sup_df) / g
    if g > sup_ddf:
        # F > 0 strictly below `lower`, so the slightly shrunk bound brackets from the left
        a = lower * (1.0 - 1e-12)
        b = upper * (1.0 + 1e-12) + 1e-300
        x0 = min(max(2.0 * w / g, a), b)
        x, r, f1, df1 = _newton(ws, cs, ss, mean, g, f0, tau, w, a, b, x0)
        if r > root_tol:
            return x, r, SOLVER_FAILED, f1, df1
        return x, r, OK, f1, df1
    step = march_step
    hi_limit = 4.0 * w / g + 4.0 * sup_df / g + 1.0
    refining = False
    for _ in range(8):
        j = max(1, int(lower / step))
        a = (j - 1) * step
        d = j * step
        found = False
        while d <= hi_limit:
            if _resid(ws, cs, ss, mean, g, f0, tau, w, d) <= 0.0:
                found = True
                break
            a = d
            d += step
        if not found:
            if refining:
                d = hi_limit
            else:
                return 0.0, 0.0, SOLVER_FAILED, 0.0, 0.0
        x, r, f1, df1 = _newton(ws, cs, ss, mean, g, f0, tau, w, a, d, 0.5 * (a + d))
        bad = -1.0
        for i in range(1, 17):
            s = x * i / 17.0
            if _resid(ws, cs, ss, mean, g, f0, tau, w, s) <= 0.0:
                bad = s
                break
        if bad < 0.0:
            if r > root_tol:
                return x, r, SOLVER_FAILED, f1, df1
            return x, r, OK, f1, df1
        hi_limit = bad
        refining = True
        step /= 16.0
    return 0.0, 0.0, SOLVER_FAILED, 0.0, 0.0


@njit(cache=True)
def _bounce(ws, cs, ss, mean, g, sup_df, sup_ddf, march_step, root_tol, tau, v):
    f0, df0, _ = _eval(ws, cs, ss, mean, tau)
    w = v + df0
    d, r, st, f1, df1 = flight_time(ws, cs, ss, mean, g, sup_df, sup_ddf, march_step, root_tol, tau, w)
    if st != OK:
        return d, v, r, st
    vb = v - 2.0 * (f1 - f0) / d + df1 + df0
    return d, vb, r, OK


@njit(cache=True)
def tennis_orbit(ws, cs, ss, mean, g, sup_df, sup_ddf, march_step, root_tol,
                 turn0, tau0, v0, n_steps):
    """Full orbit in (turns, phase, v) form.

    Returns (turns, phase, v, residuals, n_done, absorbed, status).
    """
    turns = np.zeros(n_steps + 1, dtype=np.int64)
    phase = np.zeros(n_steps + 1)
    vel = np.zeros(n_steps + 1)
    res = np.zeros(n_steps + 1)
    turns[0] = turn0
    phase[0] = tau0
    vel[0] = v0
    k = turn0
    tau = tau0
    v = v0
    n = 0
    absorbed = False
    status = OK
    while n < n_steps:
        if v <= 0.0:
            absorbed = True
            break
        d, vb, r, st = _bounce(ws, cs, ss, mean, g, sup_df, sup_ddf, march_step, root_tol, tau, v)
        if st != OK:
            status = st
            break
        v = vb
        tau += d
        whole = math.floor(tau)
        tau -= whole
        k += np.int64(whole)
        n += 1
        turns[n] = k
        phase[n] = tau
        vel[n] = v
        res[n] = r
    return turns, phase, vel, res, n, absorbed, status


@njit(cache=True)
def tennis_ensemble(ws, cs, ss, mean, g, sup_df, sup_ddf, march_step, root_tol,
                    tau0, v0, n_steps):
    """Per-orbit summary statistics without storing trajectories.

    Energies are v**2/2. Returns (e_min, e_max, absorbed, status, n_done,
    lift displacement).
    """
    m = tau0.shape[0]
    e_min = np.empty(m)
    e_max = np.empty(m)
    absorbed = np.zeros(m, dtype=np.bool_)
    status = np.zeros(m, dtype=np.int64)
    n_done = np.zeros(m, dtype=np.int64)
    disp = np.zeros(m)
    for i in range(m):
        tau = tau0[i]
        v = v0[i]
        e = 0.5 * v * v
        lo = e
        hi = e
        k = 0
        n = 0
        while n < n_steps:
            if v <= 0.0:
                absorbed[i] = True
                break
            d, vb, r, st = _bounce(ws, cs, ss, mean, g, sup_df, sup_ddf, march_step, root_tol, tau, v)
            if st != OK:
                status[i] = st
                break
            v = vb
            tau += d
            whole = math.floor(tau)
            tau -= whole
            k += int(whole)
            n += 1
            e = 0.5 * v * v
            if e < lo:
                lo = e
            if e > hi:
                hi = e
        e_min[i] = lo
        e_max[i] = hi
        n_done[i] = n
        disp[i] = k + (tau - tau0[i])
    return e_min, e_max, absorbed, status, n_done, disp


@njit(cache=True)
def standard_ensemble(k_kick, period, x0, y0, n_steps):
    """Same summary for x' = x + y - k sin x, y' = y - k sin x (momentum in place of energy)."""
    m = x0.shape[0]
    y_min = np.empty(m)
    y_max = np.empty(m)
    disp = np.zeros(m)
    for i in range(m):
        x = x0[i]
        y = y0[i]
        lo = y
        hi = y
        total = 0.0
        for _ in range(n_steps):
            y = y - k_kick * math.sin(x)
            x = x + y
            total += y
            # keep the angle small; the lift advance is accumulated separately
            x -= period * math.floor(x / period)
            if y < lo:
                lo = y
            if y > hi:
                hi = y
        y_min[i] = lo
        y_max[i] = hi
        disp[i] = total
    return y_min, y_max, disp


@njit(cache=True)
def tennis_lyapunov(ws, cs, ss, mean, g, sup_df, sup_ddf, march_step, root_tol,
                    tau0, v0, n_steps, renorm_every, u0, u1):
    """Running maximal Lyapunov exponent in (t, e) coordinates.

    Returns (running, n_done, status); running[n-1] is the estimate after n steps.
    """
    running = np.zeros(n_steps)
    tau = tau0
    v = v0
    log_sum = 0.0
    norm0 = math.sqrt(u0 * u0 + u1 * u1)
    u0 /= norm0
    u1 /= norm0
    n = 0
    status = OK
    while n < n_steps:
        if v <= 0.0:
            status = SOLVER_FAILED
            break
        f0, df0, ddf0 = _eval(ws, cs, ss, mean, tau)
        w = v + df0
        d, r, st, f1, df1 = flight_time(ws, cs, ss, mean, g, sup_df, sup_ddf, march_step,
                                        root_tol, tau, w)
        if st != OK:
            status = st
            break
        ddf1 = _eval(ws, cs, ss, mean, tau + d)[2]
        dd = (f1 - f0) / d
        dd_t = (dd - df0) / d
        dd_tb = (df1 - dd) / d
        vb = v - 2.0 * dd + df1 + df0
        alpha = 1.0 + (2.0 / g) * dd_tb
        c = 2.0 * dd_tb - ddf1
        b00 = -1.0 + (2.0 / g) * dd_t - (2.0 / g) * ddf0
        b01 = -2.0 / g
        b10 = 2.0 * dd_t - ddf0
        j00 = -b00 / alpha
        j01 = -b01 / alpha
        j10 = c * b00 / alpha - b10
        j11 = c * b01 / alpha + 1.0
        # (t, v) -> (t, e)
        j01 /= v
        j10 *= vb
        j11 *= vb / v
        x0 = j00 * u0 + j01 * u1
        x1 = j10 * u0 + j11 * u1
        u0 = x0
        u1 = x1
        n += 1
        if n % renorm_every == 0 or n == n_steps:
            nu = math.sqrt(u0 * u0 + u1 * u1)
            log_sum += math.log(nu)
            u0 /= nu
            u1 /= nu
        running[n - 1] = (log_sum + math.log(math.sqrt(u0 * u0 + u1 * u1))) / n
        v = vb
        tau += d
        tau -= math.floor(tau)
    return running, n, status

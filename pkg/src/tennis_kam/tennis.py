"""Bounce-to-bounce map of a ball falling onto a periodically moving racket.

Coordinates: impact time t (lifted to the real line; the dynamics only see
t mod 1) and either the velocity v relative to the racket just after the
impact, or the energy e = v**2 / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .profile import (
    ProfileNorms,
    RacketProfile,
    eval_derivs,
    kinetic_integral,
    norms,
    primitive,
)

TAYLOR_WINDOW = 1e-6
N_INTERIOR_CHECKS = 16
_EPS = np.finfo(float).eps


class DomainError(ValueError):
    """Point outside the region where the map / generating function is valid."""


class SolverError(RuntimeError):
    """Bounce-time equation could not be solved."""


@dataclass(frozen=True)
class TennisParams:
    profile: RacketProfile
    g: float = 1.0
    v_star: float | None = None
    root_tol: float = 1e-9
    march_step: float | None = None
    grid_n: int = 1024
    norms: ProfileNorms = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError("g must be positive")
        if not self.root_tol > 0:
            raise ValueError("root_tol must be positive")
        nrm = norms(self.profile, self.grid_n)
        object.__setattr__(self, "norms", nrm)
        if self.v_star is None:
            object.__setattr__(self, "v_star", 4.5 * nrm.sup_df + 0.5)
        if not self.v_star > 4.0 * nrm.sup_df:
            raise ValueError(f"v_star={self.v_star} must exceed 4*sup|f'| = {4.0 * nrm.sup_df}")
        if self.march_step is None:
            object.__setattr__(self, "march_step", 0.1 * (2.0 / self.g) * self.v_star)
        if not self.march_step > 0:
            raise ValueError("march_step must be positive")

    @property
    def e_star(self) -> float:
        return 0.5 * self.v_star ** 2


Coord = Literal["velocity", "energy", "momentum"]


@dataclass(frozen=True)
class LiftState:
    t: float
    value: float
    coord: Coord = "velocity"

    def __post_init__(self):
        if self.coord == "energy" and self.value < 0:
            raise ValueError("energy must be non-negative")

    def project(self, period: float = 1.0) -> tuple[float, float]:
        return self.t % period, self.value


@dataclass
class OrbitSegment:
    """Finite orbit stored as integer turns + phase so long lifts keep their digits.

    The lifted position of state n is ``turns[n] * period + phase[n]``.
    """

    turns: np.ndarray
    phase: np.ndarray
    value: np.ndarray
    residuals: np.ndarray
    absorbed: bool = False
    coord: Coord = "velocity"
    period: float = 1.0

    def __len__(self) -> int:
        return len(self.phase)

    @property
    def t(self) -> np.ndarray:
        return self.turns * self.period + self.phase

    @property
    def states(self) -> list[LiftState]:
        return [LiftState(float(x), float(y), self.coord) for x, y in zip(self.t, self.value)]

    def displacement(self, i: int = 0, j: int = -1) -> float:
        """Lift advance between states i and j, without cancellation in large lifts."""
        return float((self.turns[j] - self.turns[i]) * self.period + (self.phase[j] - self.phase[i]))

    @classmethod
    def from_lift(cls, t: Sequence[float], value: Sequence[float], coord: Coord = "velocity",
                  period: float = 1.0, residuals=None, absorbed: bool = False) -> "OrbitSegment":
        t = np.asarray(t, dtype=float)
        turns = np.floor(t / period)
        phase = t - turns * period
        res = np.zeros(len(t)) if residuals is None else np.asarray(residuals, dtype=float)
        return cls(turns.astype(np.int64), phase, np.asarray(value, dtype=float), res,
                   absorbed, coord, period)


@dataclass(frozen=True)
class GenFunEval:
    h: float
    h1: float
    h2: float
    h11: float
    h12: float
    h22: float


# -- divided differences ------------------------------------------------------

def divided_difference(profile: RacketProfile, t: float, t_bar: float) -> tuple[float, float, float]:
    """f[t, t_bar] and its partial derivatives in t and in t_bar."""
    delta = t_bar - t
    tau = t - math.floor(t)
    f0, df0, ddf0, dddf0 = eval_derivs(profile, tau)
    if abs(delta) < TAYLOR_WINDOW:
        dd = df0 + 0.5 * ddf0 * delta + dddf0 * delta * delta / 6.0
        return dd, 0.5 * ddf0 + dddf0 * delta / 6.0, 0.5 * ddf0 + dddf0 * delta / 3.0
    f1, df1, _, _ = eval_derivs(profile, tau + delta)
    dd = (f1 - f0) / delta
    return dd, (dd - df0) / delta, (df1 - dd) / delta


# -- bounce time ----------------------------------------------------------------

def _residual(profile, g, f0, tau, w, d):
    return f0 - eval_derivs(profile, tau + d)[0] + w * d - 0.5 * g * d * d


def _newton_bisect(profile, g, f0, tau, w, a, b, tol):
    """Root of F in [a, b] with F(a) > 0 >= F(b), iterated to full precision."""
    x = 0.5 * (a + b)
    fx = _residual(profile, g, f0, tau, w, x)
    for _ in range(200):
        if fx == 0.0:
            break
        if fx > 0:
            a = x
        else:
            b = x
        dfx = w - g * x - eval_derivs(profile, tau + x)[1]
        x_new = x - fx / dfx if dfx != 0.0 else 0.5 * (a + b)
        if not a < x_new < b:
            x_new = 0.5 * (a + b)
        converged = abs(x_new - x) <= 4.0 * _EPS * abs(x)
        x = x_new
        fx = _residual(profile, g, f0, tau, w, x)
        if converged or b - a <= 4.0 * _EPS * abs(b):
            break
    if abs(fx) > tol:
        raise SolverError(f"bounce-time residual {abs(fx):.3e} above tolerance {tol:.1e}")
    return x, abs(fx)


def _solve_delta(params: TennisParams, tau: float, w: float) -> tuple[float, float]:
    """Smallest positive flight time from phase tau with inertial launch speed w."""
    profile, g = params.profile, params.g
    nrm = params.norms
    f0, df0, _, _ = eval_derivs(profile, tau)
    v = w - df0
    if not v > 0:
        raise ValueError(f"launch speed w={w} does not exceed racket speed {df0}")
    limit = 4.0 * w / g + 4.0 * nrm.sup_df / g + 1.0
    # no root below either bound: F >= v d - (g + |f''|) d^2 / 2 and any root has
    # d = (2/g)(w - f[t, t+d]) with |f[.,.]| <= sup|f'|
    lower = max(2.0 * (w - nrm.sup_df) / g, 2.0 * v / (g + nrm.sup_ddf))
    step = params.march_step
    hi_limit = limit
    for _ in range(8):
        j = max(1, int(lower / step))
        a = (j - 1) * step
        d = j * step
        while d <= hi_limit:
            if _residual(profile, g, f0, tau, w, d) <= 0.0:
                break
            a, d = d, d + step
        else:
            if hi_limit == limit:
                raise SolverError(f"no bounce found within flight time {hi_limit:.6g} (w={w})")
            # refinement pass: F(hi_limit) <= 0 is already known
            d = hi_limit
        root, res = _newton_bisect(profile, g, f0, tau, w, a, d, params.root_tol)
        samples = root * np.arange(1, N_INTERIOR_CHECKS + 1) / (N_INTERIOR_CHECKS + 1)
        bad = [s for s in samples if _residual(profile, g, f0, tau, w, s) <= 0.0]
        if not bad:
            return root, res
        # marched over an earlier double crossing: search again below it, finer
        hi_limit = bad[0]
        step /= N_INTERIOR_CHECKS
    raise SolverError("could not isolate the first bounce")


def solve_bounce_time(params: TennisParams, t: float, w: float) -> tuple[float, float]:
    """Next impact time after launching at time t with inertial speed w.

    Returns ``(t_bar, residual)``.
    """
    tau = t - math.floor(t)
    delta, res = _solve_delta(params, tau, w)
    return t + delta, res


def bounce_residual(params: TennisParams, t: float, w: float, t_bar: float) -> float:
    tau = t - math.floor(t)
    f0 = eval_derivs(params.profile, tau)[0]
    return _residual(params.profile, params.g, f0, tau, w, t_bar - t)


# -- the map --------------------------------------------------------------------

def _advance(params: TennisParams, tau: float, v: float) -> tuple[float, float, float]:
    """(flight time, new relative velocity, residual) from phase tau."""
    profile = params.profile
    f0, df0, _, _ = eval_derivs(profile, tau)
    w = v + df0
    delta, res = _solve_delta(params, tau, w)
    f1, df1, _, _ = eval_derivs(profile, tau + delta)
    v_bar = v - 2.0 * (f1 - f0) / delta + df1 + df0
    return delta, v_bar, res


def step_tv(params: TennisParams, t: float, v: float) -> tuple[float, float]:
    if not v > 0:
        raise ValueError("relative velocity must be positive")
    delta, v_bar, _ = _advance(params, t - math.floor(t), v)
    return t + delta, v_bar


def step_te(params: TennisParams, t: float, e: float) -> tuple[float, float]:
    if not e > 0:
        raise ValueError("energy must be positive")
    t_bar, v_bar = step_tv(params, t, math.sqrt(2.0 * e))
    return t_bar, 0.5 * v_bar * v_bar


def iterate_tv(params: TennisParams, t0: float, v0: float, n_steps: int) -> OrbitSegment:
    """Bouncing motion from (t0, v0).

    Once the relative velocity is non-positive the ball stays on the racket
    (absorbed); iteration stops there.
    """
    if v0 < 0:
        raise ValueError("initial velocity must be non-negative")
    turns = np.zeros(n_steps + 1, dtype=np.int64)
    phase = np.zeros(n_steps + 1)
    vel = np.zeros(n_steps + 1)
    res = np.zeros(n_steps + 1)
    k = math.floor(t0)
    tau = t0 - k
    turns[0], phase[0], vel[0] = k, tau, v0
    v = v0
    n = 0
    absorbed = False
    while n < n_steps:
        if v <= 0.0:
            absorbed = True
            break
        delta, v, r = _advance(params, tau, v)
        tau += delta
        whole = math.floor(tau)
        tau -= whole
        k += whole
        n += 1
        turns[n], phase[n], vel[n], res[n] = k, tau, v, r
    m = n + 1
    return OrbitSegment(turns[:m], phase[:m], vel[:m], res[:m], absorbed, "velocity")


def kernel_args(params: TennisParams) -> tuple:
    """Flattened parameters for the compiled integrators."""
    w, c, s = params.profile.arrays()
    nrm = params.norms
    return (w, c, s, float(params.profile.mean_height), float(params.g), nrm.sup_df,
            nrm.sup_ddf, float(params.march_step), float(params.root_tol))


def bouncing_motion(params: TennisParams, t0: float, v0: float, n_steps: int,
                    engine: str = "compiled") -> OrbitSegment:
    """Bouncing motion from (t0, v0) for up to ``n_steps`` impacts.

    ``engine="python"`` runs the reference solver step by step; the compiled
    engine runs the same bracketing/Newton scheme under numba.
    """
    if engine == "python":
        return iterate_tv(params, t0, v0, n_steps)
    if v0 < 0:
        raise ValueError("initial velocity must be non-negative")
    from . import _kernels

    k = math.floor(t0)
    turns, phase, vel, res, n, absorbed, status = _kernels.tennis_orbit(
        *kernel_args(params), np.int64(k), float(t0 - k), float(v0), int(n_steps))
    if status != _kernels.OK:
        raise SolverError(f"bounce-time solve failed after {n} steps")
    m = n + 1
    return OrbitSegment(turns[:m], phase[:m], vel[:m], res[:m], bool(absorbed), "velocity")


def to_energy(segment: OrbitSegment) -> OrbitSegment:
    if segment.coord == "energy":
        return segment
    return OrbitSegment(segment.turns, segment.phase, 0.5 * segment.value ** 2,
                        segment.residuals, segment.absorbed, "energy", segment.period)


# -- Jacobian ---------------------------------------------------------------------

def jacobian_tv(params: TennisParams, t: float, v: float) -> tuple[np.ndarray, float]:
    """Jacobian of the (t, v) map by implicit differentiation; also returns v_bar."""
    profile, g = params.profile, params.g
    tau = t - math.floor(t)
    delta, v_bar, _ = _advance(params, tau, v)
    _, dd_t, dd_tb = divided_difference(profile, tau, tau + delta)
    ddf0 = eval_derivs(profile, tau)[2]
    ddf1 = eval_derivs(profile, tau + delta)[2]
    alpha = 1.0 + (2.0 / g) * dd_tb
    if not alpha > 0:
        raise DomainError("implicit system singular: state outside the validated region")
    c = 2.0 * dd_tb - ddf1
    # derivative of F with respect to (t, v)
    b00 = -1.0 + (2.0 / g) * dd_t - (2.0 / g) * ddf0
    b01 = -2.0 / g
    b10 = 2.0 * dd_t - ddf0
    b11 = -1.0
    j00 = -b00 / alpha
    j01 = -b01 / alpha
    j10 = c * b00 / alpha - b10
    j11 = c * b01 / alpha - b11
    return np.array([[j00, j01], [j10, j11]]), v_bar


def jacobian_te(params: TennisParams, t: float, e: float, strict: bool = True) -> np.ndarray:
    """Jacobian of the (t, e) map.

    With ``strict`` the state must lie above e_* = v_*^2/2, where the map is a
    proven embedding; orbit diagnostics pass ``strict=False``.
    """
    if strict and not e > params.e_star:
        raise DomainError(f"e={e} not above e_*={params.e_star}")
    v = math.sqrt(2.0 * e)
    j, v_bar = jacobian_tv(params, t, v)
    return np.array([[j[0, 0], j[0, 1] / v],
                     [v_bar * j[1, 0], v_bar * j[1, 1] / v]])


# -- generating function ----------------------------------------------------------

def domain_guard(params: TennisParams, t: float, t_bar: float) -> bool:
    delta = t_bar - t
    if not delta > 0:
        return False
    tau = t - math.floor(t)
    dd = divided_difference(params.profile, tau, tau + delta)[0]
    df0 = eval_derivs(params.profile, tau)[1]
    return delta > (2.0 / params.g) * (params.v_star - dd + df0)


def domain_boundary(params: TennisParams, t: float, tol: float = 1e-13) -> float:
    """T(t): the domain is t_bar > T(t). Located by bisection inside the a-priori sandwich."""
    g, s = params.g, params.norms.sup_df
    lo = t + (2.0 / g) * (params.v_star - 2.0 * s)
    hi = t + (2.0 / g) * (params.v_star + 2.0 * s)
    if s == 0.0:
        return lo
    while hi - lo > tol * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        if domain_guard(params, t, mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def gen_fun(params: TennisParams, t: float, t_bar: float) -> GenFunEval:
    """Generating function h(t, t_bar) with first and second partials."""
    if not domain_guard(params, t, t_bar):
        raise DomainError(f"({t}, {t_bar}) outside the generating-function domain")
    profile, g = params.profile, params.g
    delta = t_bar - t
    tau = t - math.floor(t)
    tau_bar = tau + delta
    f0, df0, ddf0, _ = eval_derivs(profile, tau)
    f1, df1, ddf1, _ = eval_derivs(profile, tau_bar)
    dd, dd_t, dd_tb = divided_difference(profile, tau, tau_bar)

    h = (g * g / 24.0 * delta ** 3
         + 0.5 * g * (f1 + f0) * delta
         - (f1 - f0) ** 2 / (2.0 * delta)
         - g * primitive(profile, tau, tau_bar)
         + 0.5 * kinetic_integral(profile, tau, tau_bar))
    p = 0.5 * g * delta + dd - df0
    q = 0.5 * g * delta - dd + df1
    h1 = -0.5 * p * p
    h2 = 0.5 * q * q
    h11 = 0.5 * g * delta * (0.5 * g + ddf0) + (dd_t - ddf0) * (df0 - dd)
    h22 = 0.5 * g * delta * (0.5 * g + ddf1) + (dd_tb - ddf1) * (dd - df1)
    # the f[t, t_bar] contributions cancel when differentiating h1 in t_bar
    h12 = -0.25 * g * g * delta + dd_tb * (df0 - dd) - 0.5 * g * (df1 - df0)
    return GenFunEval(h, h1, h2, h11, h12, h22)

"""Periodic racket motion as a finite Fourier series.

    f(t) = mean_height + sum_k [c_k cos(2 pi k t) + s_k sin(2 pi k t)]

Derivatives are exact (term-wise), so everything downstream that needs
f, f', f'', f''' gets closed-form values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Harmonic:
    k: int
    cos_coeff: float = 0.0
    sin_coeff: float = 0.0

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"harmonic index must be a positive integer, got {self.k!r}")


@dataclass(frozen=True)
class RacketProfile:
    harmonics: tuple[Harmonic, ...] = ()
    mean_height: float = 0.0

    def __post_init__(self):
        hs = tuple(h if isinstance(h, Harmonic) else Harmonic(*h) for h in self.harmonics)
        object.__setattr__(self, "harmonics", hs)

    @classmethod
    def cosine(cls, amplitude: float, k: int = 1) -> "RacketProfile":
        return cls((Harmonic(k, amplitude, 0.0),))

    @classmethod
    def sine(cls, amplitude: float, k: int = 1) -> "RacketProfile":
        return cls((Harmonic(k, 0.0, amplitude),))

    @property
    def is_flat(self) -> bool:
        return all(h.cos_coeff == 0.0 and h.sin_coeff == 0.0 for h in self.harmonics)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(angular frequencies 2 pi k, cos coefficients, sin coefficients)."""
        w = np.array([TWO_PI * h.k for h in self.harmonics], dtype=float)
        c = np.array([h.cos_coeff for h in self.harmonics], dtype=float)
        s = np.array([h.sin_coeff for h in self.harmonics], dtype=float)
        return w, c, s

    def __call__(self, t):
        return eval_derivs(self, t)[0]


def eval_derivs(profile: RacketProfile, t: float) -> tuple[float, float, float, float]:
    """Return f(t), f'(t), f''(t), f'''(t)."""
    f = profile.mean_height
    df = ddf = dddf = 0.0
    # reduce first: cos(2 pi k t) loses digits for large lifted t
    tau = t - math.floor(t)
    for h in profile.harmonics:
        w = TWO_PI * h.k
        cs = math.cos(w * tau)
        sn = math.sin(w * tau)
        a = h.cos_coeff * cs + h.sin_coeff * sn
        b = -h.cos_coeff * sn + h.sin_coeff * cs
        f += a
        df += w * b
        ddf -= w * w * a
        dddf -= w * w * w * b
    return f, df, ddf, dddf


def eval_array(profile: RacketProfile, t: np.ndarray, order: int) -> np.ndarray:
    """Vectorised derivative of the given order (0..3) on an array of times."""
    t = np.asarray(t, dtype=float)
    tau = t - np.floor(t)
    out = np.full(tau.shape, profile.mean_height if order == 0 else 0.0)
    for h in profile.harmonics:
        w = TWO_PI * h.k
        cs, sn = np.cos(w * tau), np.sin(w * tau)
        a = h.cos_coeff * cs + h.sin_coeff * sn
        b = -h.cos_coeff * sn + h.sin_coeff * cs
        out += (a, w * b, -w * w * a, -(w ** 3) * b)[order]
    return out


def primitive(profile: RacketProfile, t0: float, t1: float) -> float:
    """Closed form of the integral of f over [t0, t1]."""
    total = profile.mean_height * (t1 - t0)
    for h in profile.harmonics:
        w = TWO_PI * h.k
        total += (h.cos_coeff * (math.sin(w * t1) - math.sin(w * t0))
                  - h.sin_coeff * (math.cos(w * t1) - math.cos(w * t0))) / w
    return total


def kinetic_integral(profile: RacketProfile, t0: float, t1: float) -> float:
    """Closed form of the integral of f'(s)**2 over [t0, t1].

    Write f' = sum A_k cos(w_k s) + B_k sin(w_k s) and integrate every
    pairwise product with the product-to-sum identities.
    """
    terms = [(TWO_PI * h.k, TWO_PI * h.k * h.sin_coeff, -TWO_PI * h.k * h.cos_coeff)
             for h in profile.harmonics]

    def int_cos(w, a, b):
        if w == 0.0:
            return b - a
        return (math.sin(w * b) - math.sin(w * a)) / w

    def int_sin(w, a, b):
        if w == 0.0:
            return 0.0
        return -(math.cos(w * b) - math.cos(w * a)) / w

    total = 0.0
    for wj, aj, bj in terms:
        for wk, ak, bk in terms:
            dw, sw = wj - wk, wj + wk
            # cos*cos, sin*sin, cos*sin, sin*cos
            total += 0.5 * aj * ak * (int_cos(dw, t0, t1) + int_cos(sw, t0, t1))
            total += 0.5 * bj * bk * (int_cos(dw, t0, t1) - int_cos(sw, t0, t1))
            total += 0.5 * aj * bk * (int_sin(sw, t0, t1) - int_sin(dw, t0, t1))
            total += 0.5 * bj * ak * (int_sin(sw, t0, t1) + int_sin(dw, t0, t1))
    return total


# -- extrema -----------------------------------------------------------------

def golden_section(fun, a: float, b: float, tol: float = 1e-10) -> float:
    """Minimiser of a unimodal ``fun`` on [a, b]."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def _refined_min(fun_scalar, values: np.ndarray, grid: np.ndarray, h: float) -> tuple[float, float]:
    """Refine every discrete local minimum of a periodic sample; keep the best."""
    left = np.roll(values, 1)
    right = np.roll(values, -1)
    candidates = np.flatnonzero((values <= left) & (values <= right))
    best_t, best_v = float(grid[np.argmin(values)]), float(np.min(values))
    for i in candidates:
        t = golden_section(fun_scalar, grid[i] - h, grid[i] + h)
        v = fun_scalar(t)
        if v < best_v:
            best_t, best_v = t, v
    return best_t - math.floor(best_t), best_v


@dataclass(frozen=True)
class ProfileNorms:
    m: float          # min f''
    M: float          # max f''
    sup_df: float     # sup |f'|
    sup_ddf: float    # sup |f''|
    argmin_ddf: float
    max_df: float = 0.0
    argmax_df: float = 0.0


def norms(profile: RacketProfile, grid_n: int = 1024) -> ProfileNorms:
    if grid_n < 64:
        raise ValueError("grid_n must be at least 64")
    if profile.is_flat:
        return ProfileNorms(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    grid = np.arange(grid_n) / grid_n
    h = 1.0 / grid_n

    def d1(t):
        return eval_derivs(profile, t)[1]

    def d2(t):
        return eval_derivs(profile, t)[2]

    df = eval_array(profile, grid, 1)
    ddf = eval_array(profile, grid, 2)

    t_m, m = _refined_min(d2, ddf, grid, h)
    _, neg_M = _refined_min(lambda t: -d2(t), -ddf, grid, h)
    _, min_df = _refined_min(d1, df, grid, h)
    t_dmax, neg_max_df = _refined_min(lambda t: -d1(t), -df, grid, h)
    M, max_df = -neg_M, -neg_max_df
    return ProfileNorms(
        m=m,
        M=M,
        sup_df=max(abs(min_df), abs(max_df)),
        sup_ddf=max(abs(m), abs(M)),
        argmin_ddf=t_m,
        max_df=max_df,
        argmax_df=t_dmax,
    )


# -- closed-form sufficient conditions ---------------------------------------

@dataclass(frozen=True)
class ConditionReport:
    name: str
    holds: bool
    margin: float
    applicable: bool = True
    note: str = ""


def check_pustylnikov(nrm: ProfileNorms, g: float) -> ConditionReport:
    """Racket speed reaching g/2 somewhere: balls gaining speed at every bounce."""
    if g <= 0:
        raise ValueError("g must be positive")
    margin = nrm.max_df - g / 2.0
    return ConditionReport("pustylnikov", margin >= 0.0, margin)


def main_threshold(M: float, g: float) -> float:
    return -g / (1.0 + math.sqrt(1.0 + g / M))


def check_main_condition(nrm: ProfileNorms, g: float) -> ConditionReport:
    """m < -g / (1 + sqrt(1 + g/M)); undefined when M <= 0."""
    if g <= 0:
        raise ValueError("g must be positive")
    if nrm.M <= 0.0:
        return ConditionReport("main", False, math.nan, applicable=False,
                               note="max f'' <= 0: threshold undefined")
    margin = main_threshold(nrm.M, g) - nrm.m
    return ConditionReport("main", margin > 0.0, margin)

"""Twist systems with closed-form generating functions, plus the tennis map
wrapped in the same interface.

Every system exposes a lift map ``step(x, y)``, its Jacobian, the
generating function ``gen(x, x_bar)`` (with h1 = -y, h2 = y_bar) and a
domain predicate ``guard(x, x_bar)``. The angle period is data, not a
convention baked into the criteria.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .tennis import (
    DomainError,
    GenFunEval,
    OrbitSegment,
    SolverError,
    TennisParams,
    bouncing_motion,
    domain_guard,
    gen_fun,
    jacobian_te,
    kernel_args,
    step_te,
    to_energy,
)


@dataclass(frozen=True)
class StandardMapParams:
    k: float

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("kick strength k must be non-negative")


def standard_step(params: StandardMapParams, x: float, y: float) -> tuple[float, float]:
    y_bar = y - params.k * math.sin(x)
    return x + y_bar, y_bar


def standard_step_inverse(params: StandardMapParams, x_bar: float, y_bar: float) -> tuple[float, float]:
    x = x_bar - y_bar
    return x, y_bar + params.k * math.sin(x)


def standard_gen(params: StandardMapParams, x: float, x_bar: float) -> GenFunEval:
    """h(x, x_bar) = (x_bar - x)**2 / 2 + k cos x."""
    d = x_bar - x
    k = params.k
    return GenFunEval(
        h=0.5 * d * d + k * math.cos(x),
        h1=-d - k * math.sin(x),
        h2=d,
        h11=1.0 - k * math.cos(x),
        h12=-1.0,
        h22=1.0,
    )


def standard_ab(params: StandardMapParams, x: float) -> tuple[float, float]:
    return 2.0 - params.k * math.cos(x), 1.0


def standard_dbounds(params: StandardMapParams):
    from .criteria import d_bounds

    if not params.k > 0:
        raise ValueError("k must be positive")
    b = 2.0 + params.k
    return d_bounds(b, b, 1.0, 1.0)


class TwistSystem:
    """Common surface used by the criteria and the orbit explorer."""

    name = "twist"
    period = 1.0
    coord = "momentum"

    def step(self, x: float, y: float) -> tuple[float, float]:
        raise NotImplementedError

    def jacobian(self, x: float, y: float) -> np.ndarray:
        raise NotImplementedError

    def gen(self, x: float, x_bar: float) -> GenFunEval:
        raise NotImplementedError

    def guard(self, x: float, x_bar: float) -> bool:
        return True

    def orbit(self, x0: float, y0: float, n_steps: int) -> OrbitSegment:
        xs = np.empty(n_steps + 1)
        ys = np.empty(n_steps + 1)
        turns = np.zeros(n_steps + 1, dtype=np.int64)
        k = math.floor(x0 / self.period)
        x, y = x0 - k * self.period, y0
        xs[0], ys[0], turns[0] = x, y, k
        for n in range(1, n_steps + 1):
            x, y = self.step(x, y)
            whole = math.floor(x / self.period)
            x -= whole * self.period
            k += whole
            xs[n], ys[n], turns[n] = x, y, k
        return OrbitSegment(turns, xs, ys, np.zeros(n_steps + 1), False, self.coord, self.period)

    def ensemble(self, x0: np.ndarray, y0: np.ndarray, n_steps: int) -> dict:
        """Per-orbit (min, max, absorbed, failed, n_done, displacement) arrays."""
        raise NotImplementedError


class StandardMap(TwistSystem):
    name = "standard"
    period = 2.0 * math.pi

    def __init__(self, k: float):
        self.params = StandardMapParams(k)

    @property
    def k(self) -> float:
        return self.params.k

    def step(self, x, y):
        return standard_step(self.params, x, y)

    def inverse(self, x_bar, y_bar):
        return standard_step_inverse(self.params, x_bar, y_bar)

    def jacobian(self, x, y):
        c = -self.params.k * math.cos(x)
        return np.array([[1.0 + c, 1.0], [c, 1.0]])

    def gen(self, x, x_bar):
        return standard_gen(self.params, x, x_bar)

    def ensemble(self, x0, y0, n_steps):
        lo, hi, disp = _kernels.standard_ensemble(float(self.params.k), float(self.period),
                                                  np.asarray(x0, float), np.asarray(y0, float),
                                                  int(n_steps))
        m = len(lo)
        return dict(v_min=lo, v_max=hi, absorbed=np.zeros(m, bool), failed=np.zeros(m, bool),
                    n_done=np.full(m, n_steps), displacement=disp)


class IntegrableMap(StandardMap):
    """(x, y) -> (x + y, y) on the period-1 cylinder; h = (x_bar - x)**2 / 2."""

    name = "integrable"
    period = 1.0

    def __init__(self):
        super().__init__(0.0)


class TennisSystem(TwistSystem):
    """The bounce map in time/energy coordinates (t, e)."""

    name = "tennis"
    period = 1.0
    coord = "energy"

    def __init__(self, params: TennisParams):
        self.params = params

    def step(self, t, e):
        return step_te(self.params, t, e)

    def jacobian(self, t, e):
        return jacobian_te(self.params, t, e, strict=False)

    def gen(self, t, t_bar):
        return gen_fun(self.params, t, t_bar)

    def guard(self, t, t_bar):
        return domain_guard(self.params, t, t_bar)

    def orbit(self, t0, e0, n_steps):
        seg = bouncing_motion(self.params, t0, math.sqrt(2.0 * e0), n_steps)
        return to_energy(seg)

    def ensemble(self, t0, e0, n_steps):
        t0 = np.asarray(t0, float)
        tau0 = t0 - np.floor(t0)
        v0 = np.sqrt(2.0 * np.asarray(e0, float))
        e_min, e_max, absorbed, status, n_done, disp = _kernels.tennis_ensemble(
            *kernel_args(self.params), tau0, v0, int(n_steps))
        return dict(v_min=e_min, v_max=e_max, absorbed=absorbed,
                    failed=status != _kernels.OK, n_done=n_done, displacement=disp)


def make_system(kind: str, *, k: float | None = None, params: TennisParams | None = None) -> TwistSystem:
    if kind == "standard":
        return StandardMap(0.0 if k is None else k)
    if kind == "integrable":
        return IntegrableMap()
    if kind == "tennis":
        if params is None:
            raise ValueError("tennis system needs TennisParams")
        return TennisSystem(params)
    raise ValueError(f"unknown map kind {kind!r}")


__all__ = [
    "DomainError",
    "IntegrableMap",
    "SolverError",
    "StandardMap",
    "StandardMapParams",
    "TennisSystem",
    "TwistSystem",
    "make_system",
    "standard_ab",
    "standard_dbounds",
    "standard_gen",
    "standard_step",
    "standard_step_inverse",
]

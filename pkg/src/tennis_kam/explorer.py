"""Numerical exploration of orbits: ensembles, diffusion searches, rotation
numbers, Lyapunov exponents and energy-layer scans.

All routines work on any ``TwistSystem``; the tennis map goes through the
compiled kernels, the reference maps through their own fast paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .profile import ProfileNorms
from .reference import TennisSystem, TwistSystem
from .tennis import LiftState, OrbitSegment, SolverError, kernel_args


@dataclass(frozen=True)
class EnsembleSpec:
    t_grid: int
    e_grid: int
    e_range: tuple[float, float]
    n_steps: int
    seed: int = 0

    def __post_init__(self):
        if self.t_grid < 1 or self.e_grid < 1:
            raise ValueError("grid sizes must be positive")
        if self.n_steps < 0:
            raise ValueError("n_steps must be non-negative")
        lo, hi = self.e_range
        if not hi >= lo:
            raise ValueError("e_range must be (low, high) with low <= high")

    @property
    def size(self) -> int:
        return self.t_grid * self.e_grid


@dataclass(frozen=True)
class OrbitStats:
    ic: LiftState
    e_min: float
    e_max: float
    sup_minus_inf: float
    absorbed: bool
    failed: bool
    n_done: int
    rotation: float | None
    lyapunov: float | None = None

    @property
    def v_range(self) -> tuple[float, float]:
        """Extremes on the velocity scale (energy coordinates only)."""
        return math.sqrt(2.0 * max(self.e_min, 0.0)), math.sqrt(2.0 * max(self.e_max, 0.0))


def initial_conditions(system: TwistSystem, spec: EnsembleSpec) -> tuple[np.ndarray, np.ndarray]:
    """Cell-centred grid nodes with seeded jitter of at most half a cell.

    Ordering is value-major: index = i_value * t_grid + i_t.
    """
    rng = np.random.default_rng(spec.seed)
    lo, hi = spec.e_range
    dt = system.period / spec.t_grid
    de = (hi - lo) / spec.e_grid
    it, ie = np.meshgrid(np.arange(spec.t_grid), np.arange(spec.e_grid))
    jit = rng.uniform(-0.5, 0.5, size=(2, spec.size))
    x0 = (it.ravel() + 0.5 + jit[0]) * dt
    y0 = lo + (ie.ravel() + 0.5 + jit[1]) * de
    return x0, y0


def ensemble_run(system: TwistSystem, spec: EnsembleSpec, lyapunov: bool = False) -> list[OrbitStats]:
    x0, y0 = initial_conditions(system, spec)
    out = system.ensemble(x0, y0, spec.n_steps)
    stats = []
    for i in range(len(x0)):
        n = int(out["n_done"][i])
        absorbed = bool(out["absorbed"][i])
        failed = bool(out["failed"][i])
        rot = None
        if n > 0 and not absorbed and not failed:
            rot = float(out["displacement"][i]) / n / system.period
        lyap = None
        if lyapunov and not absorbed and not failed and spec.n_steps > 0:
            lyap = lyapunov_max(system, (x0[i], y0[i]), spec.n_steps).value
        lo, hi = float(out["v_min"][i]), float(out["v_max"][i])
        stats.append(OrbitStats(LiftState(float(x0[i]), float(y0[i]), system.coord),
                                lo, hi, hi - lo, absorbed, failed, n, rot, lyap))
    return stats


def single_step_bound(nrm: ProfileNorms, e: float) -> float:
    """Largest possible energy change in one bounce starting from energy e."""
    return 4.0 * math.sqrt(2.0 * e) * nrm.sup_df + 8.0 * nrm.sup_df ** 2


@dataclass(frozen=True)
class DiffusionResult:
    found: bool
    orbit: OrbitSegment | None
    achieved_amplitude: float
    budget_used: int
    n_steps: int = 0
    ic: LiftState | None = None


def diffusion_search(system: TwistSystem, A: float, budget: int, spec: EnsembleSpec) -> DiffusionResult:
    """Look for an orbit whose energy oscillation reaches A.

    Runs the ensemble with the orbit length doubled every round until a hit
    or until the next round would exceed ``budget`` map evaluations. A hit is
    replayed through ``system.orbit`` so the witness is a stored trajectory.
    """
    used = 0
    best = 0.0
    n = max(1, spec.n_steps)
    while used + spec.size * n <= budget:
        stats = ensemble_run(system, replace(spec, n_steps=n))
        used += sum(s.n_done for s in stats)
        top = max(stats, key=lambda s: s.sup_minus_inf)
        best = max(best, top.sup_minus_inf)
        if top.sup_minus_inf >= A:
            seg = system.orbit(top.ic.t, top.ic.value, top.n_done)
            amp = float(np.max(seg.value) - np.min(seg.value))
            return DiffusionResult(True, seg, amp, used, top.n_done, top.ic)
        n *= 2
    return DiffusionResult(False, None, best, used)


def rotation_number(segment: OrbitSegment) -> tuple[float, float]:
    """Mean advance per step in turns, with its 1/N truncation estimate."""
    if segment.absorbed:
        raise ValueError("rotation number undefined for an absorbed orbit")
    n = len(segment) - 1
    if n < 1:
        raise ValueError("need at least one step")
    return segment.displacement(0, -1) / n / segment.period, 1.0 / n


@dataclass(frozen=True)
class LyapunovResult:
    value: float
    tail_mean: float
    running: np.ndarray
    n_done: int


def lyapunov_max(system: TwistSystem, ic: tuple[float, float], n_steps: int,
                 renorm_every: int = 1, direction: tuple[float, float] = (1.0, 1.0)) -> LyapunovResult:
    """Largest Lyapunov exponent by tangent-vector propagation.

    ``tail_mean`` averages the running estimate over the last quarter; a
    drift between it and ``value`` signals non-convergence.
    """
    if n_steps < 1 or renorm_every < 1:
        raise ValueError("n_steps and renorm_every must be positive")
    x, y = ic
    if isinstance(system, TennisSystem):
        if y <= 0:
            raise ValueError("energy must be positive")
        tau = x - math.floor(x)
        running, n, status = _kernels.tennis_lyapunov(
            *kernel_args(system.params), tau, math.sqrt(2.0 * y), int(n_steps),
            int(renorm_every), float(direction[0]), float(direction[1]))
        if status != _kernels.OK:
            raise SolverError(f"orbit failed after {n} steps")
    else:
        running = np.empty(n_steps)
        u = np.asarray(direction, float)
        u /= np.linalg.norm(u)
        log_sum = 0.0
        for n in range(1, n_steps + 1):
            u = system.jacobian(x, y) @ u
            x, y = system.step(x, y)
            x -= system.period * math.floor(x / system.period)
            if n % renorm_every == 0 or n == n_steps:
                nu = float(np.linalg.norm(u))
                log_sum += math.log(nu)
                u /= nu
            running[n - 1] = (log_sum + math.log(float(np.linalg.norm(u)))) / n
        n = n_steps
    tail = running[n - max(1, n // 4):n]
    return LyapunovResult(float(running[n - 1]), float(np.mean(tail)), running[:n], int(n))


@dataclass(frozen=True)
class LayerScan:
    levels: np.ndarray
    confined: np.ndarray
    spread: np.ndarray
    lowest_unconfined: float | None


def layer_scan(system: TwistSystem, e_range: tuple[float, float], resolution: int,
               beta: float = 0.1, n_probe: int = 16, n_steps: int = 2000) -> LayerScan:
    """Probe energy levels and flag those whose orbits stay within beta * e.

    Each level is started on ``n_probe`` evenly spaced phases; a level is
    confined when no probe is absorbed or fails and every probe's
    oscillation is at most beta times the level.
    """
    if resolution < 1:
        raise ValueError("resolution must be positive")
    lo, hi = e_range
    levels = np.linspace(lo, hi, resolution)
    x0 = np.tile(np.arange(n_probe) * system.period / n_probe, resolution)
    y0 = np.repeat(levels, n_probe)
    out = system.ensemble(x0, y0, n_steps)
    amp = (out["v_max"] - out["v_min"]).reshape(resolution, n_probe)
    bad = (out["absorbed"] | out["failed"]).reshape(resolution, n_probe)
    spread = amp.max(axis=1)
    confined = ~bad.any(axis=1) & (spread <= beta * np.abs(levels))
    unconf = levels[~confined]
    return LayerScan(levels, confined, spread, float(unconf[0]) if len(unconf) else None)


__all__ = [
    "DiffusionResult",
    "EnsembleSpec",
    "LayerScan",
    "LyapunovResult",
    "OrbitStats",
    "diffusion_search",
    "ensemble_run",
    "initial_conditions",
    "layer_scan",
    "lyapunov_max",
    "rotation_number",
    "single_step_bound",
]

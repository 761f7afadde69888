import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tennis_kam.explorer import (
    EnsembleSpec,
    diffusion_search,
    ensemble_run,
    initial_conditions,
    layer_scan,
    lyapunov_max,
    rotation_number,
    single_step_bound,
)
from tennis_kam.profile import RacketProfile
from tennis_kam.reference import IntegrableMap, StandardMap, TennisSystem
from tennis_kam.tennis import OrbitSegment, TennisParams, bouncing_motion, step_te


def test_spec_validation():
    with pytest.raises(ValueError):
        EnsembleSpec(0, 1, (1, 2), 10)
    with pytest.raises(ValueError):
        EnsembleSpec(1, 1, (2, 1), 10)


@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 2 ** 32 - 1))
def test_initial_conditions_stay_in_their_cells(nt, ne, seed):
    spec = EnsembleSpec(nt, ne, (10.0, 20.0), 1, seed)
    x, y = initial_conditions(StandardMap(1.0), spec)
    period = 2 * math.pi
    i = np.arange(nt * ne)
    assert np.all(np.floor(x / (period / nt)) == i % nt)
    assert np.all(np.floor((y - 10.0) / (10.0 / ne)) == np.minimum(i // nt, ne - 1))
    x2, y2 = initial_conditions(StandardMap(1.0), spec)
    assert np.array_equal(x, x2) and np.array_equal(y, y2)


def test_flat_ensemble_conserves_energy_and_rotates(flat):
    s = TennisSystem(flat)
    stats = ensemble_run(s, EnsembleSpec(4, 3, (2.0, 8.0), 500, seed=3))
    for st_ in stats:
        assert st_.sup_minus_inf < 1e-10
        assert st_.rotation == pytest.approx(2 * math.sqrt(2 * st_.ic.value), rel=1e-12)
        assert not st_.absorbed


def test_standard_kam_regime_bounded():
    stats = ensemble_run(StandardMap(0.5), EnsembleSpec(16, 8, (0.0, 2 * math.pi), 20000, seed=1))
    amp = max(s.sup_minus_inf for s in stats)
    # KAM curves separate the cylinder: momentum stays within one resonance band
    assert amp < 2 * math.pi


@given(st.floats(0.0, 1.0, exclude_max=True), st.floats(20.0, 400.0))
def test_single_step_bound(t, e):
    p = TennisParams(RacketProfile.cosine(0.01))
    _, e_bar = step_te(p, t, e)
    assert abs(e_bar - e) < single_step_bound(p.norms, e)


def test_diffusion_budget_respected(small_cos):
    spec = EnsembleSpec(4, 2, (50.0, 60.0), 100, seed=0)
    res = diffusion_search(TennisSystem(small_cos), 1e6, 5000, spec)
    assert not res.found and res.orbit is None
    assert res.budget_used <= 5000
    assert res.budget_used == 800 + 1600  # 100 then 200 steps; 400 would overrun


def test_diffusion_witness_replays(small_cos):
    s = TennisSystem(small_cos)
    spec = EnsembleSpec(20, 5, (50.0, 60.0), 500, seed=1)
    A = 10 * single_step_bound(small_cos.norms, 60.0)
    res = diffusion_search(s, A, 5_000_000, spec)
    assert res.found and res.achieved_amplitude >= A
    replay = s.orbit(res.ic.t, res.ic.value, res.n_steps)
    assert float(np.ptp(replay.value)) == pytest.approx(res.achieved_amplitude, abs=1e-9)


def test_rotation_number():
    p = TennisParams(RacketProfile(), g=1.0, v_star=1.0)
    seg = bouncing_motion(p, 0.0, 3.0, 1000)
    w, err = rotation_number(seg)
    assert w == pytest.approx(6.0, rel=1e-12) and err == pytest.approx(1e-3)
    absorbed = OrbitSegment.from_lift([0.0], [0.0], absorbed=True)
    with pytest.raises(ValueError):
        rotation_number(absorbed)
    with pytest.raises(ValueError):
        rotation_number(OrbitSegment.from_lift([0.0], [1.0]))


def test_lyapunov_flat_and_integrable(flat):
    assert abs(lyapunov_max(TennisSystem(flat), (0.2, 10.0), 20000).value) < 1e-3
    assert abs(lyapunov_max(IntegrableMap(), (0.2, 0.3), 20000).value) < 1e-3


def test_lyapunov_standard_strong_chaos():
    # for large k the exponent approaches log(k / 2)
    res = lyapunov_max(StandardMap(10.0), (0.5, 0.1), 20000)
    assert res.value == pytest.approx(math.log(5.0), abs=0.1)
    assert abs(res.value - res.tail_mean) < 0.02


def test_lyapunov_renormalisation_invariance(small_cos):
    s = TennisSystem(small_cos)
    ic = (0.43, 55.6)
    a = lyapunov_max(s, ic, 100000, renorm_every=1).value
    b = lyapunov_max(s, ic, 100000, renorm_every=10).value
    assert abs(a - b) < 1e-2


def test_lyapunov_validation(small_cos):
    with pytest.raises(ValueError):
        lyapunov_max(StandardMap(1.0), (0, 0), 0)
    with pytest.raises(ValueError):
        lyapunov_max(TennisSystem(small_cos), (0, -1.0), 10)


def test_layer_scan(flat, small_cos):
    res = layer_scan(TennisSystem(flat), (10.0, 50.0), 5, n_probe=4, n_steps=500)
    assert res.confined.all() and res.lowest_unconfined is None
    res = layer_scan(TennisSystem(small_cos), (50.0, 60.0), 3, n_probe=16, n_steps=5000)
    assert not res.confined.all()
    assert res.lowest_unconfined == res.levels[np.argmin(res.confined)]
    with pytest.raises(ValueError):
        layer_scan(TennisSystem(flat), (1.0, 2.0), 0)

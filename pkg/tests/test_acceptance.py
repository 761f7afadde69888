"""Acceptance criteria 1-11, each at its stated tolerance.

Every test records a PASS/FAIL line (see conftest) before asserting, so the
summary at the end of a pytest run lists all eleven outcomes.
"""

import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from tennis_kam.criteria import (
    ab_along_orbit,
    d_bounds,
    records_from_orbit,
    refined_criterion,
    second_variation_test,
    simple_criterion,
    tennis_ab_asymptotic,
    tennis_thresholds,
)
from tennis_kam.explorer import EnsembleSpec, ensemble_run, lyapunov_max, single_step_bound
from tennis_kam.profile import RacketProfile, check_main_condition, eval_derivs, norms
from tennis_kam.reference import IntegrableMap, StandardMap, TennisSystem
from tennis_kam.tennis import (
    TennisParams,
    bouncing_motion,
    domain_boundary,
    gen_fun,
    jacobian_te,
    step_te,
)

GOLDEN = Path(__file__).parent / "golden"


def _bisect(fun, lo, hi, tol=1e-6):
    """Sign change of fun on [lo, hi] (fun(lo) > 0 > fun(hi))."""
    assert fun(lo) > 0 > fun(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fun(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _standard_record_at_zero(k, y=0.5):
    m = StandardMap(k)
    x_prev, _ = m.inverse(0.0, y)
    x_next, _ = m.step(0.0, y)
    return m, [ab_along_orbit(m, (x_prev, 0.0, x_next))]


def test_01_standard_simple_threshold(acceptance):
    start = time.perf_counter()
    k = _bisect(lambda k: simple_criterion(_standard_record_at_zero(k)[1]).margin, 0.5, 5.0)
    elapsed = time.perf_counter() - start
    ok = abs(k - 2.0) <= 0.01 and elapsed < 1.0
    acceptance(1, ok, f"simple boundary k = {k:.6f} (target 2 +- 0.01), {elapsed:.3f} s")
    assert ok


def test_02_standard_refined_threshold(acceptance):
    def margin(k):
        db = d_bounds(2 + k, 2 + k, 1.0, 1.0)
        return refined_criterion(_standard_record_at_zero(k)[1], db).margin

    start = time.perf_counter()
    k = _bisect(margin, 0.5, 3.0)
    elapsed = time.perf_counter() - start
    ok = abs(k - 4 / 3) <= 0.01 and elapsed < 1.0
    acceptance(2, ok, f"refined boundary k = {k:.6f} (target 4/3 +- 0.01), {elapsed:.3f} s")
    assert ok


def test_03_d_bound_identities(acceptance):
    worst_closed = worst_product = 0.0
    for k in (0.5, 1.0, 2.0, 5.0):
        db = d_bounds(2 + k, 2 + k, 1.0, 1.0)
        worst_closed = max(worst_closed, abs(db.D_plus - (1 + k / 2 + math.sqrt(k * k / 4 + k))))
        worst_product = max(worst_product, abs(db.D_plus * db.D_minus - 1.0))
    ok = worst_closed < 1e-12 and worst_product < 1e-12
    acceptance(3, ok, f"max |D+ - closed form| = {worst_closed:.2e}, max |D+ D- - 1| = {worst_product:.2e}")
    assert ok


def _random_states(params, n, rng):
    t = rng.uniform(0.0, 1.0, n)
    e = params.e_star * rng.uniform(1.0, 100.0, n)
    e = np.maximum(e, np.nextafter(params.e_star, np.inf) * (1 + 1e-12))
    return t, e


def test_04_symplecticity(acceptance):
    p = TennisParams(RacketProfile.cosine(0.01))
    rng = np.random.default_rng(4)
    t, e = _random_states(p, 1000, rng)
    start = time.perf_counter()
    worst_det = worst_fd = 0.0
    for ti, ei in zip(t, e):
        j = jacobian_te(p, ti, ei)
        worst_det = max(worst_det, abs(np.linalg.det(j) - 1.0))
        h_t, h_e = 1e-6, 1e-6 * ei
        c0 = (np.array(step_te(p, ti + h_t, ei)) - np.array(step_te(p, ti - h_t, ei))) / (2 * h_t)
        c1 = (np.array(step_te(p, ti, ei + h_e)) - np.array(step_te(p, ti, ei - h_e))) / (2 * h_e)
        fd = np.column_stack([c0, c1])
        worst_fd = max(worst_fd, float(np.max(np.abs(j - fd) / np.maximum(1.0, np.abs(j)))))
    elapsed = time.perf_counter() - start
    ok = worst_det < 1e-9 and worst_fd < 1e-5 and elapsed < 5.0
    acceptance(4, ok, f"max |det J - 1| = {worst_det:.2e}, max FD deviation = {worst_fd:.2e}, "
                      f"{elapsed:.2f} s")
    assert ok


def test_05_generating_function_consistency(acceptance):
    worst = 0.0
    for name, p in (("0.01cos", TennisParams(RacketProfile.cosine(0.01))),
                    ("0.2cos", TennisParams(RacketProfile.cosine(0.2), v_star=5.5292))):
        rng = np.random.default_rng(5)
        t, e = _random_states(p, 500, rng)
        for ti, ei in zip(t, e):
            t_bar, e_bar = step_te(p, ti, ei)
            ev = gen_fun(p, ti, t_bar)
            worst = max(worst, abs(ev.h1 + ei) / (1 + ei), abs(ev.h2 - e_bar) / (1 + ei))
    ok = worst < 1e-8
    acceptance(5, ok, f"1000 steps, max |h1 + e|, |h2 - e_bar| over (1 + e) = {worst:.2e}")
    assert ok


def test_06_integrable_exactness(acceptance):
    p = TennisParams(RacketProfile(), g=1.0, v_star=1.0)
    e0 = 7.3
    v0 = math.sqrt(2 * e0)
    seg = bouncing_motion(p, 0.1, v0, 10 ** 6)
    e = 0.5 * seg.value ** 2
    drift = float(np.max(np.abs(e - e0)))
    omega = seg.displacement() / (len(seg) - 1)
    omega_err = abs(omega - 2.0 * math.sqrt(2 * e0))
    lam = lyapunov_max(TennisSystem(p), (0.1, e0), 10 ** 6).value
    ok = drift < 1e-9 and omega_err < 1e-12 and abs(lam) < 1e-3
    acceptance(6, ok, f"10^6 steps: max |e_n - e_0| = {drift:.2e}, |omega - 2 sqrt(2e)| = "
                      f"{omega_err:.2e}, lambda = {lam:.2e}")
    assert ok


def test_07_hessian_cross_check(acceptance):
    worst = 0.0
    h = 1e-6
    for p in (TennisParams(RacketProfile.cosine(0.01)),
              TennisParams(RacketProfile.cosine(0.2), v_star=5.5292)):
        rng = np.random.default_rng(7)
        for _ in range(200):
            t = rng.uniform(0, 1)
            t_bar = domain_boundary(p, t) + rng.uniform(1e-3, 60.0)
            ev = gen_fun(p, t, t_bar)
            fd11 = (gen_fun(p, t + h, t_bar).h1 - gen_fun(p, t - h, t_bar).h1) / (2 * h)
            fd12 = (gen_fun(p, t, t_bar + h).h1 - gen_fun(p, t, t_bar - h).h1) / (2 * h)
            fd21 = (gen_fun(p, t + h, t_bar).h2 - gen_fun(p, t - h, t_bar).h2) / (2 * h)
            fd22 = (gen_fun(p, t, t_bar + h).h2 - gen_fun(p, t, t_bar - h).h2) / (2 * h)
            for exact, fd in ((ev.h11, fd11), (ev.h12, fd12), (ev.h12, fd21), (ev.h22, fd22)):
                worst = max(worst, abs(exact - fd) / max(1.0, abs(exact)))
    ok = worst < 1e-5
    acceptance(7, ok, f"400 domain points, max relative FD deviation of h11, h12, h22 = {worst:.2e}")
    assert ok


def test_08_asymptotic_enclosures(acceptance):
    p = TennisParams(RacketProfile.cosine(0.01))
    s = TennisSystem(p)
    nrm = p.norms
    checked = violations = 0
    worst_ratio = 0.0
    for t0, e0 in zip(np.linspace(0, 1, 10, endpoint=False), np.linspace(110.0, 2000.0, 10)):
        seg = s.orbit(t0, e0, 11)
        for n, rec in enumerate(records_from_orbit(s, seg), start=1):
            e = seg.value[n]
            assert e > 100
            ddf = eval_derivs(p.profile, seg.t[n])[2]
            enc = tennis_ab_asymptotic(nrm, p.g, e, ddf)
            checked += 1
            violations += not enc.contains(rec)
            mid, half = 0.5 * (enc.a[0] + enc.a[1]), 0.5 * (enc.a[1] - enc.a[0])
            worst_ratio = max(worst_ratio, abs(rec.a - mid) / half)
    ok = checked >= 100 and violations == 0
    acceptance(8, ok, f"{checked} points with e > 100, {violations} violations "
                      f"(largest a-deviation uses {worst_ratio:.2e} of its enclosure half-width)")
    assert ok


def test_09_second_variation_sanity(acceptance):
    start = time.perf_counter()
    integ = IntegrableMap()
    false_alarms = sum(second_variation_test(integ, integ.orbit(x, y, 12)).conclusive
                       for x in np.linspace(0, 1, 5) for y in (0.05, 0.3, 1.0, 4.0))
    m = StandardMap(5.0)
    hits = 0
    trials = 0
    for y in np.linspace(-3, 3, 13):
        for n in (1, 2, 5):
            start_pt = (0.0, y)
            for _ in range(n):
                start_pt = m.inverse(*start_pt)
            seg = m.orbit(start_pt[0], start_pt[1], 2 * n)
            assert abs(seg.t[n]) < 1e-9  # the segment passes through x = 0
            hits += second_variation_test(m, seg).conclusive
            trials += 1
    elapsed = time.perf_counter() - start
    ok = false_alarms == 0 and hits == trials and elapsed < 1.0
    acceptance(9, ok, f"integrable conclusive {false_alarms}/20, standard k=5 through x=0 conclusive "
                      f"{hits}/{trials}, {elapsed:.3f} s")
    assert ok


@pytest.mark.slow
def test_10_diffusion(acceptance):
    p = TennisParams(RacketProfile.cosine(0.01), g=1.0)
    cond = check_main_condition(p.norms, p.g)
    s = TennisSystem(p)
    spec = EnsembleSpec(t_grid=100, e_grid=100, e_range=(50.0, 60.0), n_steps=10 ** 5, seed=10)
    start = time.perf_counter()
    stats = ensemble_run(s, spec)
    elapsed = time.perf_counter() - start
    bound = single_step_bound(p.norms, 60.0)
    best = max(stats, key=lambda st: st.sup_minus_inf)
    replay = s.orbit(best.ic.t, best.ic.value, best.n_done)
    replay_amp = float(np.ptp(replay.value))
    replay_err = abs(replay_amp - best.sup_minus_inf)
    absorbed = sum(st.absorbed for st in stats)
    failed = sum(st.failed for st in stats)
    fixed_A = 1000.0
    reached = sum(st.sup_minus_inf >= fixed_A for st in stats)
    ok = (cond.holds and len(stats) >= 10 ** 4 and best.sup_minus_inf > 10 * bound
          and replay_err <= 1e-9 and failed == 0)
    acceptance(10, ok, f"{len(stats)} orbits x 10^5 steps in {elapsed:.0f} s: max oscillation "
                       f"{best.sup_minus_inf:.1f} = {best.sup_minus_inf / bound:.1f} x single-step bound "
                       f"{bound:.3f}; replay error {replay_err:.1e}; absorbed {absorbed}, failed {failed}; "
                       f"fixed A = {fixed_A:g} reached by {reached} orbits (reported, not gated)")
    assert ok


def test_11_threshold_regression(acceptance):
    golden = json.loads((GOLDEN / "threshold_simple.json").read_text())
    rep = tennis_thresholds(norms(RacketProfile.cosine(0.2)), 1.0, 5.5292)
    rel = abs(rep.e_star_simple - golden["e_star_simple"]) / golden["e_star_simple"]
    summand_rel = max(abs(a - b) / abs(b) for a, b in zip(rep.simple_summands, golden["summands"]))
    ok = rel <= 1e-6 and summand_rel <= 1e-6 and bool(rep.surrogate_note)
    acceptance(11, ok, f"e*_simple = {rep.e_star_simple:.10f} vs hand-computed "
                       f"{golden['e_star_simple']:.10f} (relative {rel:.1e})")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))

"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines; the
scenario-based criteria share one session fixture so the whole suite stays
well inside its runtime budgets.
"""

import math
import time

import numpy as np
import pytest

from rllp.config import GuidanceConfig
from rllp.guidance import CompensationGains, integrate_error_system
from rllp.kinematics import UavState
from rllp.path import WaypointPath, generate_nonsmooth_path
from rllp.qp import brute_force_oracle, solve
from rllp.sim import Scenario, run

from conftest import initial_state_on
from qp_problems import random_problem_suite

LD_LEVELS = [0.0, math.pi / 40, math.pi / 30, math.pi / 20, math.pi / 15, math.pi / 10]
REF_PATH_SEED = 11
BASE_SEED = 100
DURATION = 180.0

A_YC_BOUND = 25.0
A_ZC_BOUND = 14.12


def _report(name, detail):
    print(f"ACCEPTANCE PASS: {name} ({detail})")


@pytest.fixture(scope="module")
def suite_runs():
    """All closed-loop scenarios the scenario-level criteria need, run once."""
    path = generate_nonsmooth_path(seed=REF_PATH_SEED)
    cfg = GuidanceConfig()
    s0 = initial_state_on(path)

    def scenario(controller, l_d, seed):
        return Scenario(
            path=path, cfg=cfg, controller=controller, l_d=l_d,
            seed=seed, duration=DURATION, initial_state=s0,
        )

    out = {"records": []}

    t0 = time.perf_counter()
    sweep = []
    for i, l_d in enumerate(LD_LEVELS):
        records, metrics = run(scenario("rllp", l_d, BASE_SEED + i))
        sweep.append(metrics)
        out["records"].append(records)
    out["sweep"] = sweep
    out["sweep_elapsed"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    variants = {}
    for controller in ("rllp_fixed_comp", "rllp_optimal"):
        records, metrics = run(scenario(controller, math.pi / 15, BASE_SEED))
        variants[controller] = metrics
        out["records"].append(records)
    out["variants"] = variants
    out["variants_elapsed"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    records, metrics = run(scenario("rllp_optimal", math.pi / 4, BASE_SEED))
    out["records"].append(records)
    out["large_dist"] = metrics
    out["large_elapsed"] = time.perf_counter() - t0
    return out


def test_c1_settling_time_of_aligned_pursuit():
    # Forced exact alignment with a fixed target: position error from
    # (300, 400, 0) m at 25 m/s must pass below 1 m within 500/25 s + 2%.
    t0 = time.perf_counter()
    target = np.array([300.0, 400.0, 0.0])
    pos = np.zeros(3)
    v_g, dt, t = 25.0, 0.01, 0.0
    t_hit = None
    while t < 25.0:
        err = pos - target
        dist = float(np.linalg.norm(err))
        if dist < 1.0:
            t_hit = t
            break
        pos = pos - v_g * dt * err / dist
        t += dt
    elapsed = time.perf_counter() - t0
    assert t_hit is not None
    assert t_hit <= (500.0 / 25.0) * 1.02
    assert t_hit >= 19.0  # sanity: not trivially fast
    assert elapsed < 1.0
    _report("aligned-pursuit settling", f"error < 1 m at t = {t_hit:.2f} s <= 20.4 s")


def test_c2_exponential_envelope():
    # Disturbance-free pursuit of a fixed distant target from eta_lat = 0.5.
    t0 = time.perf_counter()
    path = WaypointPath.from_points([(1e7, 0.0, 0.0), (1e7 + 50.0, 0.0, 0.0)])
    sc = Scenario(
        path=path, cfg=GuidanceConfig(k_q=1.0), controller="rllp", l_d=0.0,
        seed=0, duration=10.0, initial_state=UavState(0, 0, 0, -0.5, 0.0, 25.0),
    )
    records, _ = run(sc)
    env0 = 2.0 * math.tan(0.25)
    worst = max(abs(r.eta_lat) - (env0 * math.exp(-r.t) + 1e-4) for r in records)
    elapsed = time.perf_counter() - t0
    assert len(records) == 100
    assert worst <= 0.0
    assert elapsed < 1.0
    _report("exponential envelope", f"max margin {worst:.2e} <= 0 over {len(records)} ticks")


def test_c3_finite_time_bound():
    # Exact error system, adversarial constant disturbance of norm pi/15,
    # gains summing to l_d + tau: the error norm must cross 1e-3 before the
    # settling bound 2*ln(2).
    t0 = time.perf_counter()
    l_d, tau, k_q, delta = math.pi / 15, 1.0, 1.0, math.pi / 3
    eta0 = math.pi / 4
    k = (l_d + tau) / 2.0
    d = l_d / math.sqrt(2.0)
    bound = math.log(1.0 + (k_q / tau) * math.sqrt(2.0) * math.sin(eta0)) / (k_q * math.cos(delta))
    assert bound == pytest.approx(2.0 * math.log(2.0), abs=1e-12)
    times, lats, lons = integrate_error_system(
        eta0, eta0, k_q=k_q, gains=CompensationGains(k, k),
        d_chi=d, d_gamma=d, dt=1e-4, t_max=2.0 * bound, stop_below=1e-3,
    )
    agg = math.sqrt(math.sin(lons[-1]) ** 2 + math.sin(lats[-1]) ** 2)
    elapsed = time.perf_counter() - t0
    assert agg < 1e-3
    assert times[-1] < bound
    assert elapsed < 1.0
    _report("finite-time bound", f"norm < 1e-3 at t = {times[-1]:.3f} s < {bound:.3f} s")


def test_c4_qp_oracle_equivalence():
    t0 = time.perf_counter()
    problems = random_problem_suite(seed=20240, count=1000)
    n_optimal = n_infeasible = 0
    for problem in problems:
        a = solve(problem)
        b = brute_force_oracle(problem)
        assert a.status == b.status, f"status mismatch: {a.status} vs {b.status}"
        if a.status == "optimal":
            n_optimal += 1
            assert abs(a.objective - b.objective) < 1e-6
        else:
            n_infeasible += 1
    elapsed = time.perf_counter() - t0
    assert n_optimal + n_infeasible == 1000
    assert elapsed < 5.0
    _report(
        "qp oracle equivalence",
        f"1000/1000 statuses agree ({n_optimal} optimal, {n_infeasible} infeasible), "
        f"objectives within 1e-6, {elapsed:.2f} s",
    )


def test_c5_saturation_invariant(suite_runs):
    violations = 0
    ticks = 0
    for records in suite_runs["records"]:
        for r in records:
            ticks += 1
            if not (-A_YC_BOUND - 1e-12 <= r.a_yc <= A_YC_BOUND + 1e-12):
                violations += 1
            if not (-A_ZC_BOUND - 1e-12 <= r.a_zc <= A_ZC_BOUND + 1e-12):
                violations += 1
    assert violations == 0
    _report("saturation invariant", f"0 violations across {ticks} logged ticks")


def test_c6_disturbance_trend(suite_runs):
    sweep = suite_runs["sweep"]
    assert abs(sweep[0].eta_lon.mean) < 0.01
    assert abs(sweep[0].eta_lat.mean) < 0.01
    flips = {}
    for name in ("eta_lon", "eta_lat", "a_yc", "a_zc"):
        stds = [getattr(m, name).std for m in sweep]
        good = sum(b >= a for a, b in zip(stds, stds[1:]))
        flips[name] = f"{good}/5"
        assert good >= 4, f"{name} stds not monotone enough: {stds}"
    assert suite_runs["sweep_elapsed"] < 30.0
    _report(
        "disturbance trend",
        f"non-decreasing pairs {flips}, |means(l_d=0)| < 0.01, "
        f"{suite_runs['sweep_elapsed']:.1f} s",
    )


def test_c7_optimal_variant_smoothing(suite_runs):
    fixed = suite_runs["variants"]["rllp_fixed_comp"]
    opt = suite_runs["variants"]["rllp_optimal"]
    r_yc = opt.a_yc.std / fixed.a_yc.std
    r_zc = opt.a_zc.std / fixed.a_zc.std
    assert r_yc <= 1.05
    assert r_zc <= 1.05
    assert suite_runs["variants_elapsed"] < 20.0
    _report("optimal smoothing", f"std ratios a_yc {r_yc:.3f}, a_zc {r_zc:.3f} <= 1.05")


def test_c8_large_disturbance_convergence(suite_runs):
    m = suite_runs["large_dist"]
    med = m.ed_convergence_median
    assert med is not None and med <= 10.0
    assert suite_runs["large_elapsed"] < 20.0
    _report(
        "large-disturbance convergence",
        f"median leg convergence {med:.2f} s <= 10 s "
        f"({m.converged_legs}/{m.legs} legs)",
    )

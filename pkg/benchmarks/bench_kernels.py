"""Benchmark the compiled kernels against the pure-Python twins.

Times the two hot kernels in isolation and a full closed-loop scenario per
backend. The scenario comparison re-executes this script in a subprocess with
RLLP_PURE_PYTHON=1, since the backend is chosen at import time.

Usage: python benchmarks/bench_kernels.py [--ticks 1800]
"""

import argparse
import math
import os
import subprocess
import sys
import time


def bench_rk4(mod, n=20000):
    args = (0.0, 0.0, 100.0, 0.3, 0.05, 25.0, 5.0, 12.0, 0.05, -0.03, 9.81, 0.1, 5)
    t0 = time.perf_counter()
    for _ in range(n):
        mod.rk4_step(*args)
    return (time.perf_counter() - t0) / n


def bench_qp(mod, problems):
    flat = []
    for p in problems:
        H = p.hessian
        flat.append((
            [H[0, 0], H[0, 1], H[1, 0], H[1, 1]],
            [float(v) for v in p.linear],
            [float(v) for v in p.constraint_matrix.ravel()],
            [float(v) for v in p.constraint_rhs],
            p.m,
        ))
    t0 = time.perf_counter()
    for Hf, qf, Gf, hf, m in flat:
        mod.qp_solve(2, m, Hf, qf, Gf, hf, 1e-9, 60)
    return (time.perf_counter() - t0) / len(flat)


def bench_scenario(ticks):
    from rllp.config import GuidanceConfig
    from rllp.kinematics import UavState
    from rllp.path import generate_nonsmooth_path
    from rllp.sim import Scenario, run

    path = generate_nonsmooth_path(seed=11)
    p0, p1 = path.point(0), path.point(1)
    chi = math.atan2(p1[1] - p0[1], p1[0] - p0[0])
    gamma = math.atan2(p1[2] - p0[2], math.hypot(p1[0] - p0[0], p1[1] - p0[1]))
    sc = Scenario(
        path=path, cfg=GuidanceConfig(), controller="rllp_optimal",
        l_d=math.pi / 15, seed=100, duration=ticks * 0.1,
        initial_state=UavState(p0[0], p0[1], p0[2], chi, gamma, 25.0),
    )
    t0 = time.perf_counter()
    records, _ = run(sc)
    return time.perf_counter() - t0, len(records)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--ticks", type=int, default=1800)
    parser.add_argument("--scenario-only", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.scenario_only:
        elapsed, n = bench_scenario(args.ticks)
        print(f"{elapsed:.6f} {n}")
        return

    sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "tests"))
    from qp_problems import random_problem_suite

    from rllp import _pykernels

    try:
        from rllp import _speedups
    except ImportError:
        _speedups = None

    problems = random_problem_suite(seed=77, count=400)

    print(f"{'kernel':<28}{'python':>12}{'compiled':>12}{'speedup':>9}")
    py = bench_rk4(_pykernels)
    if _speedups is not None:
        cy = bench_rk4(_speedups)
        print(f"{'rk4_step (per call)':<28}{py * 1e6:>10.2f}us{cy * 1e6:>10.2f}us{py / cy:>8.1f}x")
    else:
        print(f"{'rk4_step (per call)':<28}{py * 1e6:>10.2f}us{'n/a':>12}")

    py = bench_qp(_pykernels, problems)
    if _speedups is not None:
        cy = bench_qp(_speedups, problems)
        print(f"{'qp_solve (per problem)':<28}{py * 1e6:>10.2f}us{cy * 1e6:>10.2f}us{py / cy:>8.1f}x")
    else:
        print(f"{'qp_solve (per problem)':<28}{py * 1e6:>10.2f}us{'n/a':>12}")

    # Scenario wall time per backend (subprocess so the import picks the
    # requested backend).
    times = {}
    for label, env_val in (("compiled", "0"), ("python", "1")):
        env = dict(os.environ, RLLP_PURE_PYTHON=env_val)
        out = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--scenario-only",
             "--ticks", str(args.ticks)],
            env=env, capture_output=True, text=True, check=True,
        )
        elapsed, n = out.stdout.split()
        times[label] = float(elapsed)
        ticks = int(n)
    print(
        f"{'scenario rllp_optimal':<28}{times['python']:>10.3f} s{times['compiled']:>10.3f} s"
        f"{times['python'] / times['compiled']:>8.1f}x   ({ticks} ticks)"
    )


if __name__ == "__main__":
    main()

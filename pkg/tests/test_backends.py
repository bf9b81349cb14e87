"""Parity between the compiled kernels and their pure-Python twins."""

import math

import numpy as np
import pytest

from rllp import _pykernels

speedups = pytest.importorskip("rllp._speedups")

from qp_problems import random_problem_suite  # noqa: E402


def test_wrap_angle_parity():
    for a in np.linspace(-12.0, 12.0, 2001):
        assert speedups.wrap_angle(a) == _pykernels.wrap_angle(a)


def test_rk4_parity():
    rng = np.random.default_rng(5)
    for _ in range(300):
        args = (
            rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(-100, 100),
            rng.uniform(-3, 3), rng.uniform(-1.2, 1.2), rng.uniform(15, 35),
            rng.uniform(-25, 25), rng.uniform(-14, 14),
            rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
            9.81, 0.1, 5,
        )
        a = speedups.rk4_step(*args)
        b = _pykernels.rk4_step(*args)
        assert a[0] == b[0]
        if a[0]:
            assert np.allclose(a[1:], b[1:], rtol=1e-12, atol=1e-12)


def test_qp_parity():
    for problem in random_problem_suite(seed=321, count=120):
        H = problem.hessian
        args = (
            2, problem.m,
            [H[0, 0], H[0, 1], H[1, 0], H[1, 1]],
            [float(v) for v in problem.linear],
            [float(v) for v in problem.constraint_matrix.ravel()],
            [float(v) for v in problem.constraint_rhs],
            1e-9, 60,
        )
        xa, sa, _, _ = speedups.qp_solve(*args)
        xb, sb, _, _ = _pykernels.qp_solve(*args)
        assert sa == sb
        if sa == _pykernels.STATUS_OPTIMAL:
            scale = 1.0 + float(np.max(np.abs(problem.constraint_rhs)))
            assert np.allclose(xa, xb, rtol=1e-7, atol=1e-7 * scale)


def test_degenerate_gamma_parity():
    args = (0.0, 0.0, 0.0, 0.0, math.pi / 2 - 5e-7, 25.0, 0.0, 14.0, 0.0, 0.0, 9.81, 0.1, 5)
    assert speedups.rk4_step(*args)[0] == _pykernels.rk4_step(*args)[0] == False  # noqa: E712

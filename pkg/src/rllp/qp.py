"""Per-tick convex program choosing the compensation gains.

With the typical compensation substituted into the modified law, the command
pair is affine in the gains, u = b + A k with diagonal A. Minimizing the
weighted energy increment 0.5 * du' R du (du = db + dA k, differences taken
against the previous tick) subject to the acceleration box, the command-rate
box and the disturbance-domination row k1 + k2 >= (1+eps) L_d gives a dense
2-variable QP solved here by a primal-dual interior-point method, with an
exact active-set enumeration as the independent test oracle.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .config import GRAVITY, GuidanceConfig
from .kinematics import UavState
from .path import LookaheadGeometry

RIDGE = 1e-8  # keeps the Hessian positive definite when the geometry is static


class SingularTheta(Exception):
    """A direction cosine of the constraint normal is (near) zero; the affine
    command map is undefined. Callers degrade to fixed gains."""


@dataclass(frozen=True)
class QpProblem:
    """min 0.5 k'Hk + q'k  s.t.  G k <= h, with H symmetric PSD."""

    hessian: np.ndarray           # (2, 2)
    linear: np.ndarray            # (2,)
    constraint_matrix: np.ndarray  # (m, 2)
    constraint_rhs: np.ndarray    # (m,)

    def __post_init__(self) -> None:
        H = np.asarray(self.hessian, dtype=float)
        if H.shape != (2, 2) or abs(H[0, 1] - H[1, 0]) > 1e-12 * max(1.0, abs(H[0, 1])):
            raise ValueError("hessian must be 2x2 symmetric")
        G = np.asarray(self.constraint_matrix, dtype=float)
        h = np.asarray(self.constraint_rhs, dtype=float)
        if G.ndim != 2 or G.shape[1] != 2 or G.shape[0] < 1 or h.shape != (G.shape[0],):
            raise ValueError("constraints must be (m>=1, 2) with matching rhs")
        for arr in (H, np.asarray(self.linear, float), G, h):
            if not np.all(np.isfinite(arr)):
                raise ValueError("problem contains NaN/Inf entries")

    @property
    def m(self) -> int:
        return int(self.constraint_matrix.shape[0])

    def objective(self, k: np.ndarray) -> float:
        k = np.asarray(k, dtype=float)
        return float(0.5 * k @ self.hessian @ k + self.linear @ k)


@dataclass(frozen=True)
class QpSolution:
    """k is None unless status == "optimal"."""

    k: np.ndarray | None
    objective: float | None
    status: str               # "optimal" | "infeasible" | "max_iterations"
    iterations: int = 0


@dataclass(frozen=True)
class CommandAffineForm:
    """The affine command map u = b + A k of one tick (A diagonal)."""

    b_lat: float
    b_lon: float
    a_lat: float
    a_lon: float


def build_problem(
    geom: LookaheadGeometry,
    state: UavState,
    cfg: GuidanceConfig,
    c_dots: tuple[float, float],
    prev: CommandAffineForm | None,
    dt: float,
    k_q: float | None = None,
) -> tuple[QpProblem, CommandAffineForm]:
    """Assemble the gain QP for one tick.

    `prev` is the affine form of the previous tick; when None (first tick or
    after a reset) the rate rows are omitted and the objective is the bare
    ridge. Raises SingularTheta when either direction cosine is below the
    guard. Returns the problem and this tick's affine form for the next call.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if (not geom.theta_defined or abs(geom.sin_theta) < cfg.eps_theta
            or abs(geom.cos_theta) < cfg.eps_theta):
        raise SingularTheta(
            f"sin_theta={geom.sin_theta:.3e}, cos_theta={geom.cos_theta:.3e}"
        )
    kq = cfg.k_q if k_q is None else k_q
    cg = math.cos(state.gamma)
    c1_dot, c2_dot = c_dots
    b = np.array([
        (kq * math.sin(geom.eta_lat) + c1_dot) * state.v_g * cg,
        (kq * math.sin(geom.eta_lon) + c2_dot) * state.v_g + GRAVITY * cg,
    ])
    A = np.array([
        [state.v_g * cg / geom.sin_theta, 0.0],
        [0.0, state.v_g / geom.cos_theta],
    ])
    form = CommandAffineForm(b[0], b[1], A[0, 0], A[1, 1])

    u_max = np.array([cfg.a_yc_max, cfg.a_zc_max])
    u_min = np.array([cfg.a_yc_min, cfg.a_zc_min])
    rows = [A, -A]
    rhs = [u_max - b, b - u_min]
    if prev is None:
        hessian = RIDGE * np.eye(2)
        linear = np.zeros(2)
    else:
        dA = A - np.array([[prev.a_lat, 0.0], [0.0, prev.a_lon]])
        db = b - np.array([prev.b_lat, prev.b_lon])
        R = cfg.r_weight * np.eye(2)
        hessian = dA.T @ R @ dA + RIDGE * np.eye(2)
        linear = dA.T @ R @ db
        rows += [dA, -dA]
        rhs += [cfg.u_dot_max * dt - db, db - cfg.u_dot_min * dt]
    rows.append(np.array([[-1.0, -1.0]]))
    rhs.append(np.array([-(1.0 + cfg.epsilon) * cfg.l_d]))
    problem = QpProblem(
        hessian=hessian,
        linear=linear,
        constraint_matrix=np.vstack(rows),
        constraint_rhs=np.concatenate(rhs),
    )
    return problem, form


_STATUS_NAMES = {
    _kernels.STATUS_OPTIMAL: "optimal",
    _kernels.STATUS_INFEASIBLE: "infeasible",
    _kernels.STATUS_MAX_ITERATIONS: "max_iterations",
}


def solve(problem: QpProblem, tolerance: float = 1e-9, max_iterations: int = 60) -> QpSolution:
    """Primal-dual interior-point solve (feasibility certified by a phase-1
    max-slack subproblem). Deterministic given the inputs."""
    H = np.asarray(problem.hessian, dtype=float)
    x, status, iters, _ = _kernels.qp_solve(
        2,
        problem.m,
        [H[0, 0], 0.5 * (H[0, 1] + H[1, 0]), 0.5 * (H[0, 1] + H[1, 0]), H[1, 1]],
        [float(problem.linear[0]), float(problem.linear[1])],
        [float(v) for v in problem.constraint_matrix.ravel()],
        [float(v) for v in problem.constraint_rhs],
        tolerance,
        max_iterations,
    )
    name = _STATUS_NAMES[status]
    if name != "optimal":
        return QpSolution(None, None, name, iters)
    k = np.array(x)
    return QpSolution(k, problem.objective(k), "optimal", iters)


def brute_force_oracle(problem: QpProblem, grid_resolution: int | None = None) -> QpSolution:
    """Exact minimizer by enumerating every active set of size 0, 1 or 2.

    In two variables the constrained minimizer of a positive-definite QP is
    the best feasible candidate among: the unconstrained minimum, the
    minimum along each constraint boundary, and every pair intersection.
    Exact despite the parameter name; a positive `grid_resolution` adds a
    grid scan around the result as a cross-check (the better point wins).
    """
    H = 0.5 * (problem.hessian + problem.hessian.T)
    q = np.asarray(problem.linear, dtype=float)
    G = np.asarray(problem.constraint_matrix, dtype=float)
    h = np.asarray(problem.constraint_rhs, dtype=float)
    m = problem.m
    feas_tol = 1e-8 * max(1.0, float(np.max(np.abs(h))))

    try:
        Hinv = np.linalg.inv(H)
    except np.linalg.LinAlgError:
        Hinv = np.linalg.inv(H + 1e-12 * np.eye(2))

    candidates = [-Hinv @ q]
    for i in range(m):
        g = G[i]
        w = Hinv @ g
        denom = float(g @ w)
        if denom <= 1e-300:
            continue
        x_u = -Hinv @ q
        candidates.append(x_u + w * ((h[i] - g @ x_u) / denom))
    for i, j in itertools.combinations(range(m), 2):
        M = np.array([G[i], G[j]])
        det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
        scale = max(1.0, float(np.abs(M).max()) ** 2)
        if abs(det) <= 1e-12 * scale:
            continue
        candidates.append(np.linalg.solve(M, np.array([h[i], h[j]])))

    best_x, best_obj = None, math.inf
    for x in candidates:
        if np.all(G @ x <= h + feas_tol):
            obj = problem.objective(x)
            if obj < best_obj:
                best_x, best_obj = x, obj
    if best_x is None:
        return QpSolution(None, None, "infeasible")

    if grid_resolution is not None and grid_resolution > 0:
        span = max(1.0, float(np.max(np.abs(best_x)))) * 2.0
        axis = np.linspace(-span, span, grid_resolution) + best_x[0]
        ayis = np.linspace(-span, span, grid_resolution) + best_x[1]
        for gx in axis:
            for gy in ayis:
                x = np.array([gx, gy])
                if np.all(G @ x <= h + feas_tol):
                    obj = problem.objective(x)
                    if obj < best_obj:
                        best_x, best_obj = x, obj

    return QpSolution(best_x, best_obj, "optimal")


def kkt_residuals(problem: QpProblem, k: np.ndarray, active_tol: float = 1e-6):
    """(stationarity, complementarity, primal feasibility) residuals of a
    candidate optimum; multipliers recovered by least squares on the active set."""
    G = np.asarray(problem.constraint_matrix, dtype=float)
    h = np.asarray(problem.constraint_rhs, dtype=float)
    grad = problem.hessian @ k + problem.linear
    slack = h - G @ k
    primal = float(max(0.0, float(np.max(-slack)))) if len(slack) else 0.0
    active = slack < active_tol * max(1.0, float(np.max(np.abs(h))))
    if active.any():
        Ga = G[active]
        z, *_ = np.linalg.lstsq(Ga.T, -grad, rcond=None)
        z = np.maximum(z, 0.0)
        stationarity = float(np.max(np.abs(grad + Ga.T @ z)))
        comp = float(np.max(np.abs(z * slack[active])))
    else:
        stationarity = float(np.max(np.abs(grad)))
        comp = 0.0
    return stationarity, comp, primal

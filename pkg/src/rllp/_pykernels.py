"""Pure-Python hot kernels: 3-DOF RK4 propagation and a small dense QP solver.

``rllp._speedups`` is the compiled twin of this module; the two are kept in
lockstep operation-for-operation so either backend produces the same numbers.
``rllp._kernels`` picks whichever is importable.

The QP solver is a two-phase primal-dual interior-point method for

    minimize    0.5 * x'Hx + q'x
    subject to  Gx <= h

with H symmetric positive definite and a handful of rows (the per-tick
compensation-gain problem has n=2, m<=9). Phase 1 maximizes the worst slack
to find a strictly interior start (or certify that none exists); phase 2
follows the central path with Mehrotra predictor-corrector steps. Iterates
stay primal feasible, so the reported "primal residual" of an optimal
solution is zero by construction and the duality gap s'z is the convergence
measure. A halving backtrack keeps the gap non-increasing.
"""

import math

BACKEND = "python"

STATUS_OPTIMAL = 0
STATUS_INFEASIBLE = 1
STATUS_MAX_ITERATIONS = 2

_COS_GAMMA_FLOOR = 1e-6
_TWO_PI = 2.0 * math.pi


def wrap_angle(a):
    """Wrap to (-pi, pi]."""
    r = math.fmod(a + math.pi, _TWO_PI)
    if r <= 0.0:
        r += _TWO_PI
    return r - math.pi


def rk4_step(x, y, z, chi, gamma, v_g, a_yc, a_zc, d_chi, d_gamma, g, dt, substeps):
    """Advance the 3-DOF state by dt with command and disturbance held constant.

    Classical 4th-order Runge-Kutta over `substeps` equal sub-intervals.
    Returns (ok, x, y, z, chi, gamma); ok is False when |cos(gamma)| drops
    below 1e-6 at any derivative evaluation (the track-angle equation divides
    by cos(gamma)). chi is wrapped to (-pi, pi] at the end.
    """
    h = dt / substeps
    for _ in range(substeps):
        d1 = _deriv(chi, gamma, v_g, a_yc, a_zc, d_chi, d_gamma, g)
        if d1 is None:
            return False, x, y, z, chi, gamma
        d2 = _deriv(chi + 0.5 * h * d1[3], gamma + 0.5 * h * d1[4],
                    v_g, a_yc, a_zc, d_chi, d_gamma, g)
        if d2 is None:
            return False, x, y, z, chi, gamma
        d3 = _deriv(chi + 0.5 * h * d2[3], gamma + 0.5 * h * d2[4],
                    v_g, a_yc, a_zc, d_chi, d_gamma, g)
        if d3 is None:
            return False, x, y, z, chi, gamma
        d4 = _deriv(chi + h * d3[3], gamma + h * d3[4],
                    v_g, a_yc, a_zc, d_chi, d_gamma, g)
        if d4 is None:
            return False, x, y, z, chi, gamma
        w = h / 6.0
        x += w * (d1[0] + 2.0 * (d2[0] + d3[0]) + d4[0])
        y += w * (d1[1] + 2.0 * (d2[1] + d3[1]) + d4[1])
        z += w * (d1[2] + 2.0 * (d2[2] + d3[2]) + d4[2])
        chi += w * (d1[3] + 2.0 * (d2[3] + d3[3]) + d4[3])
        gamma += w * (d1[4] + 2.0 * (d2[4] + d3[4]) + d4[4])
    if math.cos(gamma) < _COS_GAMMA_FLOOR:
        return False, x, y, z, chi, gamma
    return True, x, y, z, wrap_angle(chi), gamma


def _deriv(chi, gamma, v_g, a_yc, a_zc, d_chi, d_gamma, g):
    # Signed check: valid flight keeps cos(gamma) > 0; at or past vertical the
    # track-angle equation is meaningless.
    cg = math.cos(gamma)
    if cg < _COS_GAMMA_FLOOR:
        return None
    return (
        v_g * cg * math.cos(chi),
        v_g * cg * math.sin(chi),
        v_g * math.sin(gamma),
        a_yc / (v_g * cg) + d_chi,
        (a_zc - g * cg) / v_g + d_gamma,
    )


# --------------------------------------------------------------------------
# QP solver
# --------------------------------------------------------------------------

def qp_solve(n, m, H, q, G, h, tol, max_iter):
    """Solve min 0.5 x'Hx + q'x s.t. Gx <= h (H positive definite).

    H, q, G, h are flat row-major lists of floats. Returns
    (x, status, iterations, gaps) where gaps is the duality-gap history of
    the main solve (non-increasing by construction).
    """
    if m == 0:
        x = _solve_spd(n, list(H), list(q))
        for i in range(n):
            x[i] = -x[i]
        return x, STATUS_OPTIMAL, 0, []

    scale = 1.0
    for i in range(m):
        ah = abs(h[i])
        if ah > scale:
            scale = ah

    # Strictly interior start for the original problem, if the origin works.
    x0 = [0.0] * n
    min_slack = min(h)
    if min_slack > 1e-6 * scale:
        x, status, iters, gaps = _ip_core(n, m, H, q, G, h, x0, tol, max_iter)
        return x, status, iters, gaps

    # Phase 1: maximize the worst slack t over (x, t):
    #   min 0.5*lam*|y|^2 - t  s.t.  Gx + t <= h, t <= t_cap
    lam = 1e-8
    t_cap = 2.0 * scale + 2.0
    n1 = n + 1
    m1 = m + 1
    H1 = [0.0] * (n1 * n1)
    for i in range(n1):
        H1[i * n1 + i] = lam
    q1 = [0.0] * n1
    q1[n] = -1.0
    G1 = [0.0] * (m1 * n1)
    h1 = [0.0] * m1
    for i in range(m):
        for j in range(n):
            G1[i * n1 + j] = G[i * n + j]
        G1[i * n1 + n] = 1.0
        h1[i] = h[i]
    G1[m * n1 + n] = 1.0
    h1[m] = t_cap

    y0 = [0.0] * n1
    y0[n] = min_slack - 0.5 * (1.0 + scale)
    y, status1, iters1, _ = _ip_core(n1, m1, H1, q1, G1, h1, y0, 1e-10 * scale, max_iter)
    if status1 == STATUS_MAX_ITERATIONS:
        return [0.0] * n, STATUS_MAX_ITERATIONS, iters1, []
    t_star = y[n]
    if t_star <= 1e-9 * scale:
        return [0.0] * n, STATUS_INFEASIBLE, iters1, []

    x0 = y[:n]
    x, status, iters, gaps = _ip_core(n, m, H, q, G, h, x0, tol, max_iter)
    return x, status, iters1 + iters, gaps


def _ip_core(n, m, H, q, G, h, x0, tol, max_iter):
    """Mehrotra predictor-corrector from a strictly feasible x0."""
    x = list(x0)
    s = [0.0] * m
    z = [1.0] * m
    for i in range(m):
        acc = h[i]
        for j in range(n):
            acc -= G[i * n + j] * x[j]
        s[i] = acc if acc > 1e-300 else 1e-300

    gaps = []
    W = [0.0] * (n * n)
    hx_q = [0.0] * n
    rhs = [0.0] * n
    dx_a = [0.0] * n
    dx = [0.0] * n
    ds_a = [0.0] * m
    dz_a = [0.0] * m
    ds = [0.0] * m
    dz = [0.0] * m

    rd_tol = 1e-9 * _dual_scale(n, q)
    for it in range(1, max_iter + 1):
        gap = 0.0
        for i in range(m):
            gap += s[i] * z[i]
        gaps.append(gap)

        # hx_q = Hx + q; dual residual rd = hx_q + G'z
        rd_inf = 0.0
        for j in range(n):
            acc = q[j]
            for k in range(n):
                acc += H[j * n + k] * x[k]
            hx_q[j] = acc
            for i in range(m):
                acc += G[i * n + j] * z[i]
            if abs(acc) > rd_inf:
                rd_inf = abs(acc)
        if gap < tol and rd_inf < rd_tol:
            return x, STATUS_OPTIMAL, it - 1, gaps

        mu = gap / m

        # W = H + G' diag(z/s) G
        for j in range(n):
            for k in range(n):
                acc = H[j * n + k]
                for i in range(m):
                    acc += G[i * n + j] * (z[i] / s[i]) * G[i * n + k]
                W[j * n + k] = acc

        # Affine (predictor) direction: W dx = -(Hx + q)
        for j in range(n):
            rhs[j] = -hx_q[j]
        _spd_solve_into(n, W, rhs, dx_a)
        for i in range(m):
            acc = 0.0
            for j in range(n):
                acc += G[i * n + j] * dx_a[j]
            ds_a[i] = -acc
            dz_a[i] = -z[i] + (z[i] / s[i]) * acc

        a_aff = _max_step(m, s, ds_a, z, dz_a)
        mu_aff = 0.0
        for i in range(m):
            mu_aff += (s[i] + a_aff * ds_a[i]) * (z[i] + a_aff * dz_a[i])
        mu_aff /= m
        sigma = (mu_aff / mu) ** 3 if mu > 0.0 else 0.0
        if sigma > 1.0:
            sigma = 1.0

        # Corrected direction: W dx = -(Hx+q) - G'((sigma*mu - ds_a*dz_a)/s)
        for j in range(n):
            acc = -hx_q[j]
            for i in range(m):
                acc -= G[i * n + j] * ((sigma * mu - ds_a[i] * dz_a[i]) / s[i])
            rhs[j] = acc
        _spd_solve_into(n, W, rhs, dx)
        for i in range(m):
            acc = 0.0
            for j in range(n):
                acc += G[i * n + j] * dx[j]
            ds[i] = -acc
            dz[i] = -z[i] + (sigma * mu - ds_a[i] * dz_a[i]) / s[i] + (z[i] / s[i]) * acc

        alpha = 0.99 * _max_step(m, s, ds, z, dz)
        if alpha > 1.0:
            alpha = 1.0
        # Keep the duality gap monotone: halve the step until it does not grow.
        for _ in range(40):
            g_new = 0.0
            for i in range(m):
                g_new += (s[i] + alpha * ds[i]) * (z[i] + alpha * dz[i])
            if g_new <= gap or alpha < 1e-12:
                break
            alpha *= 0.5

        for j in range(n):
            x[j] += alpha * dx[j]
        for i in range(m):
            acc = h[i]
            for j in range(n):
                acc -= G[i * n + j] * x[j]
            s[i] = acc if acc > 1e-300 else 1e-300
            z[i] += alpha * dz[i]
            if z[i] < 1e-300:
                z[i] = 1e-300

    return x, STATUS_MAX_ITERATIONS, max_iter, gaps


def _dual_scale(n, q):
    sc = 1.0
    for j in range(n):
        if abs(q[j]) > sc:
            sc = abs(q[j])
    return sc


def _max_step(m, s, ds, z, dz):
    a = 1.0
    for i in range(m):
        if ds[i] < 0.0:
            r = -s[i] / ds[i]
            if r < a:
                a = r
        if dz[i] < 0.0:
            r = -z[i] / dz[i]
            if r < a:
                a = r
    return a


def _spd_solve_into(n, A, b, out):
    """Cholesky solve of a tiny SPD system (n <= 4), A row-major."""
    L = [0.0] * (n * n)
    for i in range(n):
        for j in range(i + 1):
            acc = A[i * n + j]
            for k in range(j):
                acc -= L[i * n + k] * L[j * n + k]
            if i == j:
                # Tiny diagonal lift keeps near-singular systems solvable.
                L[i * n + i] = math.sqrt(acc) if acc > 1e-300 else 1e-150
            else:
                L[i * n + j] = acc / L[j * n + j]
    ytmp = [0.0] * n
    for i in range(n):
        acc = b[i]
        for k in range(i):
            acc -= L[i * n + k] * ytmp[k]
        ytmp[i] = acc / L[i * n + i]
    for i in range(n - 1, -1, -1):
        acc = ytmp[i]
        for k in range(i + 1, n):
            acc -= L[k * n + i] * out[k]
        out[i] = acc / L[i * n + i]


def _solve_spd(n, A, b):
    out = [0.0] * n
    _spd_solve_into(n, A, b, out)
    return out

# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of rllp._pykernels.

Kept in lockstep with the pure-Python module operation for operation (same
formulas, same evaluation order, no FMA contraction) so both backends agree
to rounding. See _pykernels for the algorithm notes.
"""

from libc.math cimport cos, fabs, fmod, pow, sin, sqrt

BACKEND = "compiled"

STATUS_OPTIMAL = 0
STATUS_INFEASIBLE = 1
STATUS_MAX_ITERATIONS = 2

cdef double _COS_GAMMA_FLOOR = 1e-6
cdef double _PI = 3.141592653589793
cdef double _TWO_PI = 6.283185307179586

# Static capacities: the gain problem is 2 variables / <= 9 rows and phase 1
# adds one of each; these leave ample headroom.
cdef enum:
    N_MAX = 4
    M_MAX = 64


cdef inline double _wrap(double a) noexcept nogil:
    cdef double r = fmod(a + _PI, _TWO_PI)
    if r <= 0.0:
        r += _TWO_PI
    return r - _PI


def wrap_angle(double a):
    """Wrap to (-pi, pi]."""
    return _wrap(a)


cdef inline bint _deriv(double chi, double gamma, double v_g, double a_yc,
                        double a_zc, double d_chi, double d_gamma, double g,
                        double* out) noexcept nogil:
    # Signed check: valid flight keeps cos(gamma) > 0; at or past vertical the
    # track-angle equation is meaningless.
    cdef double cg = cos(gamma)
    if cg < _COS_GAMMA_FLOOR:
        return False
    out[0] = v_g * cg * cos(chi)
    out[1] = v_g * cg * sin(chi)
    out[2] = v_g * sin(gamma)
    out[3] = a_yc / (v_g * cg) + d_chi
    out[4] = (a_zc - g * cg) / v_g + d_gamma
    return True


def rk4_step(double x, double y, double z, double chi, double gamma,
             double v_g, double a_yc, double a_zc, double d_chi, double d_gamma,
             double g, double dt, int substeps):
    """Compiled twin of _pykernels.rk4_step."""
    cdef double h = dt / substeps
    cdef double d1[5]
    cdef double d2[5]
    cdef double d3[5]
    cdef double d4[5]
    cdef double w
    cdef int i
    for i in range(substeps):
        if not _deriv(chi, gamma, v_g, a_yc, a_zc, d_chi, d_gamma, g, d1):
            return False, x, y, z, chi, gamma
        if not _deriv(chi + 0.5 * h * d1[3], gamma + 0.5 * h * d1[4],
                      v_g, a_yc, a_zc, d_chi, d_gamma, g, d2):
            return False, x, y, z, chi, gamma
        if not _deriv(chi + 0.5 * h * d2[3], gamma + 0.5 * h * d2[4],
                      v_g, a_yc, a_zc, d_chi, d_gamma, g, d3):
            return False, x, y, z, chi, gamma
        if not _deriv(chi + h * d3[3], gamma + h * d3[4],
                      v_g, a_yc, a_zc, d_chi, d_gamma, g, d4):
            return False, x, y, z, chi, gamma
        w = h / 6.0
        x += w * (d1[0] + 2.0 * (d2[0] + d3[0]) + d4[0])
        y += w * (d1[1] + 2.0 * (d2[1] + d3[1]) + d4[1])
        z += w * (d1[2] + 2.0 * (d2[2] + d3[2]) + d4[2])
        chi += w * (d1[3] + 2.0 * (d2[3] + d3[3]) + d4[3])
        gamma += w * (d1[4] + 2.0 * (d2[4] + d3[4]) + d4[4])
    if cos(gamma) < _COS_GAMMA_FLOOR:
        return False, x, y, z, chi, gamma
    return True, x, y, z, _wrap(chi), gamma


# --------------------------------------------------------------------------
# QP solver
# --------------------------------------------------------------------------

cdef void _spd_solve_into(int n, double* A, double* b, double* out) noexcept nogil:
    cdef double L[N_MAX * N_MAX]
    cdef double ytmp[N_MAX]
    cdef double acc
    cdef int i, j, k
    for i in range(n * n):
        L[i] = 0.0
    for i in range(n):
        for j in range(i + 1):
            acc = A[i * n + j]
            for k in range(j):
                acc -= L[i * n + k] * L[j * n + k]
            if i == j:
                L[i * n + i] = sqrt(acc) if acc > 1e-300 else 1e-150
            else:
                L[i * n + j] = acc / L[j * n + j]
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


cdef double _max_step(int m, double* s, double* ds, double* z, double* dz) noexcept nogil:
    cdef double a = 1.0
    cdef double r
    cdef int i
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


cdef int _ip_core(int n, int m, double* H, double* q, double* G, double* h,
                  double* x, double tol, int max_iter, int* iters_out,
                  list gaps) except -1:
    """Mehrotra predictor-corrector from a strictly feasible x (in/out)."""
    cdef double s[M_MAX]
    cdef double z[M_MAX]
    cdef double W[N_MAX * N_MAX]
    cdef double hx_q[N_MAX]
    cdef double rhs[N_MAX]
    cdef double dx_a[N_MAX]
    cdef double dx[N_MAX]
    cdef double ds_a[M_MAX]
    cdef double dz_a[M_MAX]
    cdef double ds[M_MAX]
    cdef double dz[M_MAX]
    cdef double acc, gap, rd_inf, mu, a_aff, mu_aff, sigma, alpha, g_new, rd_tol
    cdef int i, j, k, it, bt

    for i in range(m):
        acc = h[i]
        for j in range(n):
            acc -= G[i * n + j] * x[j]
        s[i] = acc if acc > 1e-300 else 1e-300
        z[i] = 1.0

    rd_tol = 1.0
    for j in range(n):
        if fabs(q[j]) > rd_tol:
            rd_tol = fabs(q[j])
    rd_tol = 1e-9 * rd_tol

    for it in range(1, max_iter + 1):
        gap = 0.0
        for i in range(m):
            gap += s[i] * z[i]
        gaps.append(gap)

        rd_inf = 0.0
        for j in range(n):
            acc = q[j]
            for k in range(n):
                acc += H[j * n + k] * x[k]
            hx_q[j] = acc
            for i in range(m):
                acc += G[i * n + j] * z[i]
            if fabs(acc) > rd_inf:
                rd_inf = fabs(acc)
        if gap < tol and rd_inf < rd_tol:
            iters_out[0] = it - 1
            return STATUS_OPTIMAL

        mu = gap / m

        for j in range(n):
            for k in range(n):
                acc = H[j * n + k]
                for i in range(m):
                    acc += G[i * n + j] * (z[i] / s[i]) * G[i * n + k]
                W[j * n + k] = acc

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
        sigma = pow(mu_aff / mu, 3.0) if mu > 0.0 else 0.0
        if sigma > 1.0:
            sigma = 1.0

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
        for bt in range(40):
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

    iters_out[0] = max_iter
    return STATUS_MAX_ITERATIONS


def qp_solve(int n, int m, H, q, G, h, double tol, int max_iter):
    """Compiled twin of _pykernels.qp_solve."""
    if n > N_MAX - 1 or m > M_MAX - 1:
        raise ValueError(f"problem too large for the compiled kernel: n={n}, m={m}")

    cdef double Hc[N_MAX * N_MAX]
    cdef double qc[N_MAX]
    cdef double Gc[M_MAX * N_MAX]
    cdef double hc[M_MAX]
    cdef double x[N_MAX]
    cdef double H1[N_MAX * N_MAX]
    cdef double q1[N_MAX]
    cdef double G1[M_MAX * N_MAX]
    cdef double h1[M_MAX]
    cdef double y[N_MAX]
    cdef double scale, min_slack, lam, t_cap, t_star
    cdef int i, j, status, n1, m1
    cdef int iters = 0
    cdef int iters1 = 0

    for i in range(n * n):
        Hc[i] = H[i]
    for i in range(n):
        qc[i] = q[i]
    for i in range(m * n):
        Gc[i] = G[i]
    for i in range(m):
        hc[i] = h[i]

    cdef list gaps = []
    if m == 0:
        _spd_solve_into(n, Hc, qc, x)
        return [-x[i] for i in range(n)], STATUS_OPTIMAL, 0, gaps

    scale = 1.0
    for i in range(m):
        if fabs(hc[i]) > scale:
            scale = fabs(hc[i])

    min_slack = hc[0]
    for i in range(1, m):
        if hc[i] < min_slack:
            min_slack = hc[i]

    if min_slack > 1e-6 * scale:
        for i in range(n):
            x[i] = 0.0
        status = _ip_core(n, m, Hc, qc, Gc, hc, x, tol, max_iter, &iters, gaps)
        return [x[i] for i in range(n)], status, iters, gaps

    lam = 1e-8
    t_cap = 2.0 * scale + 2.0
    n1 = n + 1
    m1 = m + 1
    for i in range(n1 * n1):
        H1[i] = 0.0
    for i in range(n1):
        H1[i * n1 + i] = lam
        q1[i] = 0.0
    q1[n] = -1.0
    for i in range(m1 * n1):
        G1[i] = 0.0
    for i in range(m):
        for j in range(n):
            G1[i * n1 + j] = Gc[i * n + j]
        G1[i * n1 + n] = 1.0
        h1[i] = hc[i]
    G1[m * n1 + n] = 1.0
    h1[m] = t_cap

    for i in range(n):
        y[i] = 0.0
    y[n] = min_slack - 0.5 * (1.0 + scale)
    cdef list gaps1 = []
    status = _ip_core(n1, m1, H1, q1, G1, h1, y, 1e-10 * scale, max_iter, &iters1, gaps1)
    if status == STATUS_MAX_ITERATIONS:
        return [0.0] * n, STATUS_MAX_ITERATIONS, iters1, gaps
    t_star = y[n]
    if t_star <= 1e-9 * scale:
        return [0.0] * n, STATUS_INFEASIBLE, iters1, gaps

    for i in range(n):
        x[i] = y[i]
    status = _ip_core(n, m, Hc, qc, Gc, hc, x, tol, max_iter, &iters, gaps)
    return [x[i] for i in range(n)], status, iters1 + iters, gaps

"""Look-ahead pursuit law with robust compensation and saturation handling.

The base law steers the velocity direction onto the line of sight:

    a_yc = k_q v_g sin(eta_lat) cos(gamma)
    a_zc = k_q v_g sin(eta_lon) + g cos(gamma)

The compensation layer injects angular-rate terms (f_chi, f_gamma) that
dominate the disturbance bound along the constraint normal (sin_theta,
cos_theta), restoring finite-time convergence; law-frame terms are
f_lat = c1_dot - f_chi, f_lon = c2_dot - f_gamma, clipped so the assembled
commands stay inside the acceleration box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .config import GRAVITY, GuidanceConfig
from .kinematics import AccelCommand, UavState
from .path import LookaheadGeometry


class NonPositiveTau(Exception):
    """Settling-time bound requires a strictly positive margin tau."""


def _clip(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v


def base_law(
    geom: LookaheadGeometry, state: UavState, cfg: GuidanceConfig, k_q: float | None = None
) -> AccelCommand:
    """Pursuit command from the look-ahead angles, saturated to the config box.

    The angles are clamped to [-delta, +delta] before the sine, keeping the
    law monotone in the raw angle; saturation then absorbs anything left.
    `k_q` overrides cfg.k_q (used by the decremental gain search).
    """
    kq = cfg.k_q if k_q is None else k_q
    eta_lat = _clip(geom.eta_lat, -cfg.delta, cfg.delta)
    eta_lon = _clip(geom.eta_lon, -cfg.delta, cfg.delta)
    cg = math.cos(state.gamma)
    a_yc = kq * state.v_g * math.sin(eta_lat) * cg
    a_zc = kq * state.v_g * math.sin(eta_lon) + GRAVITY * cg
    return AccelCommand(
        _clip(a_yc, cfg.a_yc_min, cfg.a_yc_max),
        _clip(a_zc, cfg.a_zc_min, cfg.a_zc_max),
    )


@dataclass(frozen=True)
class CompensationGains:
    """Gain pair scaling the two compensation axes, rad/s."""

    k1: float
    k2: float


class TypicalCompensation(NamedTuple):
    f_chi: float
    f_gamma: float
    chi_singular: bool
    gamma_singular: bool


def typical_compensation(
    geom: LookaheadGeometry, gains: CompensationGains, eps_theta: float = 1e-6
) -> TypicalCompensation:
    """The standard gain-over-direction-cosine compensation pair.

    f_chi = -k1/sin_theta, f_gamma = -k2/cos_theta; an axis whose direction
    cosine is below eps_theta is zeroed and flagged singular (near-zero
    look-ahead error needs no compensation there).
    """
    chi_singular = abs(geom.sin_theta) < eps_theta or not geom.theta_defined
    gamma_singular = abs(geom.cos_theta) < eps_theta or not geom.theta_defined
    f_chi = 0.0 if chi_singular else -gains.k1 / geom.sin_theta
    f_gamma = 0.0 if gamma_singular else -gains.k2 / geom.cos_theta
    return TypicalCompensation(f_chi, f_gamma, chi_singular, gamma_singular)


@dataclass(frozen=True)
class CompensationBox:
    """Admissible boxes for the compensation terms (rad/s), both frames."""

    f_lat_min: float
    f_lat_max: float
    f_lon_min: float
    f_lon_max: float
    f_chi_min: float
    f_chi_max: float
    f_gamma_min: float
    f_gamma_max: float


def compensation_box(
    geom: LookaheadGeometry,
    state: UavState,
    cfg: GuidanceConfig,
    c1_dot: float,
    c2_dot: float,
    k_q: float | None = None,
) -> CompensationBox:
    """Bounds keeping the assembled commands inside the acceleration box.

    The law-frame box comes straight from the acceleration limits; the
    angular-rate-frame box is its image under f = c_dot - f_frame. `k_q`
    overrides cfg.k_q during the decremental search.
    """
    kq = cfg.k_q if k_q is None else k_q
    cg = math.cos(state.gamma)
    eta_lat = _clip(geom.eta_lat, -cfg.delta, cfg.delta)
    eta_lon = _clip(geom.eta_lon, -cfg.delta, cfg.delta)
    f_lat_min = cfg.a_yc_min / (state.v_g * cg) - kq * math.sin(eta_lat)
    f_lat_max = cfg.a_yc_max / (state.v_g * cg) - kq * math.sin(eta_lat)
    f_lon_min = (cfg.a_zc_min - GRAVITY * cg - kq * math.sin(eta_lon) * state.v_g) / state.v_g
    f_lon_max = (cfg.a_zc_max - GRAVITY * cg - kq * math.sin(eta_lon) * state.v_g) / state.v_g
    return CompensationBox(
        f_lat_min=f_lat_min,
        f_lat_max=f_lat_max,
        f_lon_min=f_lon_min,
        f_lon_max=f_lon_max,
        f_chi_min=c1_dot - f_lat_max,
        f_chi_max=c1_dot - f_lat_min,
        f_gamma_min=c2_dot - f_lon_max,
        f_gamma_max=c2_dot - f_lon_min,
    )


def check_feasibility(
    geom: LookaheadGeometry, box: CompensationBox, l_d: float
) -> tuple[bool, float]:
    """Can any compensation in the box dominate the disturbance bound?

    Evaluates the box vertex minimizing f_chi*sin_theta + f_gamma*cos_theta
    (the corner opposite the constraint normal). Feasible iff that minimum
    plus l_d is strictly negative; tau_star = -(minimum + l_d) is the largest
    admissible convergence margin (negative when infeasible).
    """
    best = math.inf
    for f_chi in (box.f_chi_min, box.f_chi_max):
        for f_gamma in (box.f_gamma_min, box.f_gamma_max):
            v = f_chi * geom.sin_theta + f_gamma * geom.cos_theta
            if v < best:
                best = v
    tau_star = -(best + l_d)
    return best + l_d <= -1e-12, tau_star


@dataclass(frozen=True)
class CompensationTerms:
    """Realized compensation after clipping, both frames."""

    f_chi: float
    f_gamma: float
    f_lat: float
    f_lon: float
    clipped: bool


def clip_and_assemble(
    base: AccelCommand,
    f_chi: float,
    f_gamma: float,
    c_dots: tuple[float, float],
    state: UavState,
    geom: LookaheadGeometry,
    cfg: GuidanceConfig,
    k_q: float | None = None,
) -> tuple[AccelCommand, CompensationTerms]:
    """Clip the law-frame compensation into its box and add it to the law.

    The composition uses the *unsaturated* law value (the box formulas are
    derived against it), so the assembled commands land inside the
    acceleration box exactly when the compensation rails; the final clip is
    a no-op then, and reproduces `base` when the compensation is zero.
    """
    kq = cfg.k_q if k_q is None else k_q
    c1_dot, c2_dot = c_dots
    box = compensation_box(geom, state, cfg, c1_dot, c2_dot, kq)
    f_lat = c1_dot - f_chi
    f_lon = c2_dot - f_gamma
    f_lat_hat = _clip(f_lat, box.f_lat_min, box.f_lat_max)
    f_lon_hat = _clip(f_lon, box.f_lon_min, box.f_lon_max)
    clipped = (f_lat_hat != f_lat) or (f_lon_hat != f_lon)
    cg = math.cos(state.gamma)
    eta_lat = _clip(geom.eta_lat, -cfg.delta, cfg.delta)
    eta_lon = _clip(geom.eta_lon, -cfg.delta, cfg.delta)
    raw_yc = kq * state.v_g * math.sin(eta_lat) * cg
    raw_zc = kq * state.v_g * math.sin(eta_lon) + GRAVITY * cg
    a_yc = _clip(raw_yc + state.v_g * cg * f_lat_hat, cfg.a_yc_min, cfg.a_yc_max)
    a_zc = _clip(raw_zc + state.v_g * f_lon_hat, cfg.a_zc_min, cfg.a_zc_max)
    terms = CompensationTerms(f_chi, f_gamma, f_lat_hat, f_lon_hat, clipped)
    return AccelCommand(a_yc, a_zc), terms


def settling_time_bound(geom: LookaheadGeometry, cfg: GuidanceConfig, tau: float) -> float:
    """Upper bound on the time for the compensated angular errors to vanish."""
    if tau <= 0.0:
        raise NonPositiveTau(f"tau must be > 0, got {tau}")
    s = math.sqrt(math.sin(geom.eta_lon) ** 2 + math.sin(geom.eta_lat) ** 2)
    return math.log(1.0 + (cfg.k_q / tau) * s) / (cfg.k_q * math.cos(cfg.delta))


def attraction_region_bound(
    cfg: GuidanceConfig, sup_disturbance: float, epsilon_target: float
) -> tuple[float, float]:
    """Conservative robust-stability region estimate (diagnostic only).

    Returns (max initial error norm for a given disturbance level, max
    disturbance level keeping the error below epsilon_target).
    """
    if epsilon_target <= 0.0:
        raise ValueError(f"epsilon_target must be > 0, got {epsilon_target}")
    kc = cfg.k_q * math.cos(cfg.delta)
    max_initial = (math.pi / 2.0) * math.sqrt(sup_disturbance / kc)
    max_dist = 16.0 * epsilon_target**2 * kc / math.pi**4
    return max_initial, max_dist


def decremental_kq_search(
    geom: LookaheadGeometry,
    state: UavState,
    cfg: GuidanceConfig,
    c1_dot: float,
    c2_dot: float,
) -> tuple[float, bool]:
    """Shrink k_q geometrically until the compensation box becomes feasible.

    Shrinking k_q shifts the box toward admissible corners (monotone in k_q),
    so the first feasible grid point is the largest feasible one. Returns
    (k_q_floor, False) when even the floor fails.
    """
    kq = cfg.k_q
    while True:
        box = compensation_box(geom, state, cfg, c1_dot, c2_dot, kq)
        feasible, _ = check_feasibility(geom, box, cfg.l_d)
        if feasible:
            return kq, True
        if kq <= cfg.k_q_floor:
            return cfg.k_q_floor, False
        kq = max(kq * cfg.k_q_decay, cfg.k_q_floor)


def integrate_error_system(
    eta_lat0: float,
    eta_lon0: float,
    k_q: float,
    gains: CompensationGains | None,
    d_chi: float,
    d_gamma: float,
    dt: float,
    t_max: float,
    eps_theta: float = 1e-6,
    stop_below: float | None = None,
) -> tuple[list[float], list[float], list[float]]:
    """Integrate the reduced angular-error system with RK4 (diagnostic oracle).

        e_lat' = -k_q sin(e_lat) + f_chi + d_chi
        e_lon' = -k_q sin(e_lon) + f_gamma + d_gamma

    with the typical compensation recomputed from the current state (zero
    when `gains` is None) and the disturbance held constant. Stops early once
    sqrt(sin^2 e_lon + sin^2 e_lat) < stop_below, if given. Returns the
    (times, e_lat, e_lon) samples.
    """
    if dt <= 0.0 or t_max <= 0.0:
        raise ValueError("dt and t_max must be > 0")

    def f(e_lat: float, e_lon: float) -> tuple[float, float]:
        if gains is None:
            f_chi = f_gamma = 0.0
        else:
            n_lat = math.sin(e_lat) * math.cos(e_lat)
            n_lon = math.sin(e_lon) * math.cos(e_lon)
            den = math.sqrt(n_lat * n_lat + n_lon * n_lon)
            sin_t = n_lat / den if den >= 1e-12 else 0.0
            cos_t = n_lon / den if den >= 1e-12 else 0.0
            f_chi = 0.0 if abs(sin_t) < eps_theta else -gains.k1 / sin_t
            f_gamma = 0.0 if abs(cos_t) < eps_theta else -gains.k2 / cos_t
        return (-k_q * math.sin(e_lat) + f_chi + d_chi,
                -k_q * math.sin(e_lon) + f_gamma + d_gamma)

    e_lat, e_lon = eta_lat0, eta_lon0
    times, lats, lons = [0.0], [e_lat], [e_lon]
    t = 0.0
    while t < t_max - 1e-15:
        k1a, k1b = f(e_lat, e_lon)
        k2a, k2b = f(e_lat + 0.5 * dt * k1a, e_lon + 0.5 * dt * k1b)
        k3a, k3b = f(e_lat + 0.5 * dt * k2a, e_lon + 0.5 * dt * k2b)
        k4a, k4b = f(e_lat + dt * k3a, e_lon + dt * k3b)
        e_lat += dt / 6.0 * (k1a + 2.0 * (k2a + k3a) + k4a)
        e_lon += dt / 6.0 * (k1b + 2.0 * (k2b + k3b) + k4b)
        t += dt
        times.append(t)
        lats.append(e_lat)
        lons.append(e_lon)
        if stop_below is not None:
            if math.sqrt(math.sin(e_lon) ** 2 + math.sin(e_lat) ** 2) < stop_below:
                break
    return times, lats, lons

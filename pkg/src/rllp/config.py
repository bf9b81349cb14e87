"""Controller configuration shared by the path, guidance, qp and sim layers."""

from __future__ import annotations

import math
from dataclasses import dataclass

GRAVITY = 9.81  # m/s^2


@dataclass(frozen=True)
class GuidanceConfig:
    """All tunables of the pursuit law and its compensation layer.

    Immutable so one instance can be shared across concurrent runs. Angle
    fields are radians, rates rad/s, accelerations m/s^2, jerk m/s^3.
    """

    k_q: float = 1.0              # pursuit gain, 1/s
    delta: float = math.pi / 3    # look-ahead angle cap, 0 < delta < pi/2
    l_d: float = 0.0              # angular-rate disturbance bound, rad/s
    tau_hat: float = 1.0          # convergence-margin estimate for target admission
    q_l: float = 2.0              # look-ahead coefficient, seconds (distance = q_l * v_g)

    a_yc_min: float = -25.0
    a_yc_max: float = 25.0
    a_zc_min: float = -14.12
    a_zc_max: float = 14.12
    a_bzc_min: float = -30.0
    a_bzc_max: float = 30.0
    phi_c_min: float = -math.pi
    phi_c_max: float = math.pi

    u_dot_min: float = -40.0      # command rate limits, m/s^3 (per axis)
    u_dot_max: float = 40.0

    epsilon: float = 0.1          # disturbance-rejection margin of the gain-sum constraint
    k_q_floor: float = 0.2        # decremental-search lower bound on k_q
    k_q_decay: float = 0.8        # decremental-search multiplier

    comp_k1: float = 0.52         # fixed compensation gains, rad/s
    comp_k2: float = 0.52

    capture_radius: float = 2.0   # m, target reached / path exhausted
    r_weight: float = 0.1         # R = r_weight * I in the energy-increment objective
    qp_tol: float = 1e-9
    qp_max_iter: int = 60
    eps_theta: float = 1e-6       # singularity guard on sin/cos of the constraint normal

    disturbance_mode: str = "box"  # "box" (joint bound holds) or "std_matched"

    def __post_init__(self) -> None:
        if not 0.0 < self.delta < math.pi / 2:
            raise ValueError(f"delta must be in (0, pi/2), got {self.delta}")
        if self.l_d < 0.0:
            raise ValueError(f"l_d must be >= 0, got {self.l_d}")
        if self.k_q <= 0.0:
            raise ValueError(f"k_q must be > 0, got {self.k_q}")
        if self.epsilon <= 0.0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.k_q_floor <= 0.0 or not 0.0 < self.k_q_decay < 1.0:
            raise ValueError("k_q_floor must be > 0 and k_q_decay in (0, 1)")
        for lo, hi, name in (
            (self.a_yc_min, self.a_yc_max, "a_yc"),
            (self.a_zc_min, self.a_zc_max, "a_zc"),
            (self.a_bzc_min, self.a_bzc_max, "a_bzc"),
            (self.phi_c_min, self.phi_c_max, "phi_c"),
            (self.u_dot_min, self.u_dot_max, "u_dot"),
        ):
            if lo >= hi:
                raise ValueError(f"{name}_min must be < {name}_max")
        if self.disturbance_mode not in ("box", "std_matched"):
            raise ValueError(f"unknown disturbance_mode {self.disturbance_mode!r}")

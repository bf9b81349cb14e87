"""3-DOF point-mass UAV model: state, perturbed angular kinematics, integration.

The velocity vector has constant magnitude v_g; the track angle chi and path
angle gamma steer it. Lateral/normal acceleration commands drive the angle
rates, with additive bounded angular-rate disturbances:

    x' = v_g cos(gamma) cos(chi)
    y' = v_g cos(gamma) sin(chi)
    z' = v_g sin(gamma)
    chi'   = a_yc / (v_g cos(gamma)) + d_chi
    gamma' = (a_zc - g cos(gamma)) / v_g + d_gamma
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .config import GRAVITY


class DegenerateGamma(Exception):
    """cos(gamma) vanished; the track-angle equation is singular (vertical flight)."""


class ZeroCommand(Exception):
    """Both acceleration components are zero; the attitude form is undefined."""


class AttitudeOutOfRange(Exception):
    """Converted attitude command violates the configured bounds."""


@dataclass(frozen=True)
class UavState:
    """Position (m, local tangent frame), track/path angles (rad), airspeed (m/s)."""

    x_p: float
    y_p: float
    z_p: float
    chi: float      # wrapped to (-pi, pi]
    gamma: float    # |gamma| < pi/2
    v_g: float      # > 0

    def __post_init__(self) -> None:
        if not -math.pi < self.chi <= math.pi:
            raise ValueError(f"chi must be in (-pi, pi], got {self.chi}")
        if abs(self.gamma) >= math.pi / 2:
            raise ValueError(f"|gamma| must be < pi/2, got {self.gamma}")
        if self.v_g <= 0.0:
            raise ValueError(f"v_g must be > 0, got {self.v_g}")

    @property
    def position(self) -> tuple[float, float, float]:
        return (self.x_p, self.y_p, self.z_p)

    def velocity_direction(self) -> tuple[float, float, float]:
        cg = math.cos(self.gamma)
        return (cg * math.cos(self.chi), cg * math.sin(self.chi), math.sin(self.gamma))


@dataclass(frozen=True)
class AccelCommand:
    """Lateral (a_yc) and normal-plane (a_zc) acceleration commands, m/s^2."""

    a_yc: float
    a_zc: float


@dataclass(frozen=True)
class AttitudeCommand:
    """Body-normal acceleration (m/s^2) and bank angle (rad) form of a command."""

    a_bzc: float
    phi_c: float


@dataclass(frozen=True)
class DisturbanceSample:
    """Angular-rate disturbance pair (rad/s) acting on chi and gamma."""

    d_chi: float
    d_gamma: float

    def norm(self) -> float:
        return math.hypot(self.d_chi, self.d_gamma)


def step(state: UavState, cmd: AccelCommand, dist: DisturbanceSample, dt: float) -> UavState:
    """Advance `state` by `dt` under zero-order-held command and disturbance.

    Classical RK4 with 5 equal substeps. Raises DegenerateGamma when
    cos(gamma) falls below 1e-6 at any substage.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    ok, x, y, z, chi, gamma = _kernels.rk4_step(
        state.x_p, state.y_p, state.z_p, state.chi, state.gamma,
        state.v_g, cmd.a_yc, cmd.a_zc, dist.d_chi, dist.d_gamma,
        GRAVITY, dt, 5,
    )
    if not ok:
        raise DegenerateGamma(
            f"cos(gamma) < 1e-6 while integrating from gamma={state.gamma:.6f}"
        )
    return UavState(x, y, z, chi, gamma, state.v_g)


def command_to_attitude(
    cmd: AccelCommand,
    bounds: tuple[float, float, float, float] | None = None,
) -> AttitudeCommand:
    """Convert (a_yc, a_zc) into the equivalent (a_bzc, phi_c) pair.

    Inverts a_yc = a_bzc cos(phi_c), a_zc = a_bzc sin(phi_c). `bounds` is
    (a_bzc_min, a_bzc_max, phi_c_min, phi_c_max); when given, a result outside
    them raises AttitudeOutOfRange.
    """
    if cmd.a_yc == 0.0 and cmd.a_zc == 0.0:
        raise ZeroCommand("attitude form undefined for (0, 0)")
    a_bzc = math.hypot(cmd.a_yc, cmd.a_zc)
    phi_c = math.atan2(cmd.a_zc, cmd.a_yc)
    if bounds is not None:
        bz_lo, bz_hi, phi_lo, phi_hi = bounds
        if not (bz_lo <= a_bzc <= bz_hi) or not (phi_lo <= phi_c <= phi_hi):
            raise AttitudeOutOfRange(
                f"(a_bzc={a_bzc:.6g}, phi_c={phi_c:.6g}) outside {bounds}"
            )
    return AttitudeCommand(a_bzc, phi_c)


def attitude_to_command(att: AttitudeCommand) -> AccelCommand:
    """Inverse of command_to_attitude."""
    return AccelCommand(att.a_bzc * math.cos(att.phi_c), att.a_bzc * math.sin(att.phi_c))


def sample_disturbance(
    rng: np.random.Generator, l_d: float, mode: str = "box"
) -> DisturbanceSample:
    """Draw one disturbance pair from the seeded generator.

    "box": each axis uniform on [-l_d/sqrt(2), +l_d/sqrt(2)], so the joint
    bound ||d|| <= l_d holds by construction (per-axis std l_d/sqrt(6)).
    "std_matched": each axis uniform with std l_d/sqrt(2) (half-width
    l_d*sqrt(3/2)); matches the quoted per-axis deviation but can exceed the
    joint bound. Two draws are consumed either way.
    """
    if l_d < 0.0:
        raise ValueError(f"l_d must be >= 0, got {l_d}")
    if mode == "box":
        half = l_d / math.sqrt(2.0)
    elif mode == "std_matched":
        half = l_d * math.sqrt(1.5)
    else:
        raise ValueError(f"unknown disturbance mode {mode!r}")
    d = rng.uniform(-half, half, size=2)
    return DisturbanceSample(float(d[0]), float(d[1]))

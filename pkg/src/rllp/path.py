"""Waypoint polylines, virtual-target selection and look-ahead geometry.

The reference path is a discrete ordered point set; the virtual target is
always one of its points (no segment interpolation), selected either by the
basic look-ahead-distance rule or by the constrained rule that also demands
small look-ahead angles and enough flight time to settle them before arrival.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import wrap_angle
from .config import GuidanceConfig
from .kinematics import UavState


class DegenerateLos(Exception):
    """UAV sits on the target, or the line of sight is vertical."""


class PathExhausted(Exception):
    """The final waypoint has been reached; nothing left to pursue."""


class TargetSwitched(Exception):
    """Finite difference requested across a target switch; reset instead."""


class PathFormatError(Exception):
    """Waypoint file rejected (bad values, duplicates, wrong arity)."""


@dataclass(frozen=True)
class WaypointPath:
    """Ordered 3D polyline (meters) with a cumulative arc-length index."""

    points: np.ndarray          # (n, 3) float64
    cum_arclength: np.ndarray   # (n,), cum_arclength[0] == 0, strictly increasing

    def __len__(self) -> int:
        return len(self.points)

    def point(self, index: int) -> tuple[float, float, float]:
        p = self.points[index]
        return (float(p[0]), float(p[1]), float(p[2]))

    @classmethod
    def from_points(cls, pts) -> "WaypointPath":
        arr = np.asarray(pts, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 3 or arr.shape[0] < 2:
            raise PathFormatError("path needs an (n>=2, 3) array of waypoints")
        if not np.all(np.isfinite(arr)):
            raise PathFormatError("path contains NaN or Inf coordinates")
        seg = np.linalg.norm(np.diff(arr, axis=0), axis=1)
        if np.any(seg <= 1e-9):
            raise PathFormatError("consecutive duplicate waypoints (segment <= 1e-9 m)")
        cum = np.concatenate(([0.0], np.cumsum(seg)))
        return cls(points=arr, cum_arclength=cum)


def load_path_csv(filename) -> WaypointPath:
    """Read waypoints from a text file: one `x,y,z` line each, `#` comments."""
    pts = []
    with open(filename, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise PathFormatError(f"{filename}:{lineno}: expected 3 fields, got {len(parts)}")
            try:
                xyz = [float(p) for p in parts]
            except ValueError as exc:
                raise PathFormatError(f"{filename}:{lineno}: {exc}") from None
            if not all(math.isfinite(v) for v in xyz):
                raise PathFormatError(f"{filename}:{lineno}: non-finite coordinate")
            pts.append(xyz)
    if len(pts) < 2:
        raise PathFormatError(f"{filename}: need at least 2 waypoints, got {len(pts)}")
    return WaypointPath.from_points(pts)


def save_path_csv(path: WaypointPath, filename) -> None:
    with open(filename, "w", encoding="utf-8") as f:
        f.write("# x,y,z [m]\n")
        for p in path.points:
            f.write(f"{p[0]:.9g},{p[1]:.9g},{p[2]:.9g}\n")


def generate_nonsmooth_path(
    seed: int,
    segments: int = 6,
    spacing: float = 200.0,
    seg_length_min: float = 500.0,
    seg_length_max: float = 900.0,
    max_turn: float = math.radians(60.0),
    max_climb: float = math.radians(8.0),
    start: tuple[float, float, float] = (0.0, 0.0, 100.0),
    altitude_floor: float = 30.0,
) -> WaypointPath:
    """Deterministic piecewise-linear 3D path with sharp corners and climb legs.

    Stand-in for unpublished survey terrain paths: straight legs joined at
    corners with turn angles up to `max_turn`, alternating climb/glide within
    `max_climb`, waypoints every `spacing` meters (corners exact).
    """
    if segments < 1:
        raise ValueError("segments must be >= 1")
    rng = np.random.default_rng(seed)
    heading = 0.0
    pos = np.array(start, dtype=np.float64)
    pts = [pos.copy()]
    for k in range(segments):
        if k > 0:
            turn = rng.uniform(0.35 * max_turn, max_turn) * rng.choice((-1.0, 1.0))
            heading = wrap_angle(heading + turn)
        climb = rng.uniform(-max_climb, max_climb)
        if pos[2] + 0.5 * seg_length_min * math.sin(climb) < altitude_floor:
            climb = abs(climb)
        length = rng.uniform(seg_length_min, seg_length_max)
        n_steps = max(1, round(length / spacing))
        step_len = length / n_steps
        d = np.array([
            math.cos(climb) * math.cos(heading),
            math.cos(climb) * math.sin(heading),
            math.sin(climb),
        ])
        for _ in range(n_steps):
            pos = pos + step_len * d
            pts.append(pos.copy())
    return WaypointPath.from_points(pts)


@dataclass(frozen=True)
class TargetSelection:
    """A chosen virtual target: path point, its index, and whether the
    constrained candidate set was non-empty."""

    point: tuple[float, float, float]
    index: int
    feasible: bool


@dataclass(frozen=True)
class LookaheadGeometry:
    """Line-of-sight geometry between the UAV and its virtual target.

    c1/c2 are the LOS azimuth and elevation; eta_lat/eta_lon the look-ahead
    angles (LOS relative to the velocity direction) in the lateral and
    longitudinal planes. sin_theta/cos_theta are the direction cosines of the
    compensation constraint normal; theta_defined is False when both
    look-ahead angles are so small that the shared denominator vanishes.
    """

    eta_lat: float
    eta_lon: float
    c1: float
    c2: float
    sin_theta: float
    cos_theta: float
    theta_defined: bool


def compute_geometry(state: UavState, target: tuple[float, float, float]) -> LookaheadGeometry:
    """LOS angles and constraint-normal direction cosines for one target."""
    dx = target[0] - state.x_p
    dy = target[1] - state.y_p
    dz = target[2] - state.z_p
    r_h = math.hypot(dx, dy)
    if math.sqrt(dx * dx + dy * dy + dz * dz) <= 1e-9:
        raise DegenerateLos("target coincides with the UAV position")
    if r_h <= 1e-9:
        raise DegenerateLos("vertical line of sight; azimuth undefined")
    c1 = math.atan2(dy, dx)
    c2 = math.atan2(dz, r_h)
    eta_lat = wrap_angle(c1 - state.chi)
    eta_lon = wrap_angle(c2 - state.gamma)
    n_lat = math.sin(eta_lat) * math.cos(eta_lat)
    n_lon = math.sin(eta_lon) * math.cos(eta_lon)
    den = math.sqrt(n_lat * n_lat + n_lon * n_lon)
    if den < 1e-9:
        return LookaheadGeometry(eta_lat, eta_lon, c1, c2, 0.0, 0.0, False)
    return LookaheadGeometry(eta_lat, eta_lon, c1, c2, n_lat / den, n_lon / den, True)


def _ahead_mask(state: UavState, pts: np.ndarray) -> np.ndarray:
    """Positive inner product between LOS and the velocity direction."""
    v = np.array(state.velocity_direction())
    los = pts - np.array([state.x_p, state.y_p, state.z_p])
    return los @ v > 0.0


def select_target_basic(
    state: UavState, path: WaypointPath, q_l: float, prev_index: int,
    capture_radius: float = 2.0,
) -> TargetSelection:
    """Pick the ahead point whose distance best matches the look-ahead length
    q_l * v_g; falls back to the final waypoint when nothing is ahead."""
    last = len(path) - 1
    if not 0 <= prev_index <= last:
        raise IndexError(f"prev_index {prev_index} outside path of {len(path)} points")
    pts = path.points[prev_index:]
    dists = np.linalg.norm(pts - np.array([state.x_p, state.y_p, state.z_p]), axis=1)
    if prev_index == last and dists[0] <= capture_radius:
        raise PathExhausted(f"final waypoint reached (distance {dists[0]:.3f} m)")
    ahead = _ahead_mask(state, pts)
    if not ahead.any():
        return TargetSelection(path.point(last), last, False)
    score = np.where(ahead, np.abs(q_l * state.v_g - dists), np.inf)
    i = int(np.argmin(score))  # argmin takes the first hit: lowest index wins ties
    return TargetSelection(path.point(prev_index + i), prev_index + i, True)


def settling_horizon(eta_lat: float, eta_lon: float, k_q: float, tau: float, delta: float) -> float:
    """Settling-time upper bound for the compensated error system (seconds)."""
    s = math.sqrt(math.sin(eta_lon) ** 2 + math.sin(eta_lat) ** 2)
    return math.log(1.0 + (k_q / tau) * s) / (k_q * math.cos(delta))


def select_target_constrained(
    state: UavState, path: WaypointPath, cfg: GuidanceConfig, prev_index: int,
) -> TargetSelection:
    """Closest admissible point at index >= prev_index.

    Admissible: both look-ahead angles within +-delta and distance at least
    v_g times the settling horizon at the current angles, so the angular
    error has time to die out before arrival. Falls back to the basic
    selector (feasible=False) when the admissible set is empty.
    """
    last = len(path) - 1
    if not 0 <= prev_index <= last:
        raise IndexError(f"prev_index {prev_index} outside path of {len(path)} points")
    pos = np.array([state.x_p, state.y_p, state.z_p])
    pts = path.points[prev_index:]
    rel = pts - pos
    d_xy = np.hypot(rel[:, 0], rel[:, 1])
    dists = np.sqrt(d_xy**2 + rel[:, 2] ** 2)
    if prev_index == last and dists[0] <= cfg.capture_radius:
        raise PathExhausted(f"final waypoint reached (distance {dists[0]:.3f} m)")

    valid = (dists > 1e-9) & (d_xy > 1e-9)
    c1 = np.arctan2(rel[:, 1], rel[:, 0])
    c2 = np.arctan2(rel[:, 2], d_xy)
    eta_lat = _wrap_array(c1 - state.chi)
    eta_lon = _wrap_array(c2 - state.gamma)
    ok = valid & (np.abs(eta_lat) <= cfg.delta) & (np.abs(eta_lon) <= cfg.delta)
    if ok.any():
        s = np.sqrt(np.sin(eta_lon) ** 2 + np.sin(eta_lat) ** 2)
        horizon = np.log1p((cfg.k_q / cfg.tau_hat) * s) / (cfg.k_q * math.cos(cfg.delta))
        ok &= dists >= state.v_g * horizon
    if ok.any():
        score = np.where(ok, dists, np.inf)
        i = int(np.argmin(score))
        return TargetSelection(path.point(prev_index + i), prev_index + i, True)
    fallback = select_target_basic(state, path, cfg.q_l, prev_index, cfg.capture_radius)
    return TargetSelection(fallback.point, fallback.index, False)


def _wrap_array(a: np.ndarray) -> np.ndarray:
    return np.mod(a + math.pi, 2.0 * math.pi) - math.pi


def finite_difference_los(
    current: LookaheadGeometry, previous: LookaheadGeometry, dt: float
) -> tuple[float, float]:
    """LOS angular rates from two consecutive geometries of the same target.

    Differences are taken on the circle (shortest signed arc). Call through
    LosRateDifferentiator in a simulation loop; it owns the reset-on-switch
    convention.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    return (
        wrap_angle(current.c1 - previous.c1) / dt,
        wrap_angle(current.c2 - previous.c2) / dt,
    )


class LosRateDifferentiator:
    """Finite-difference LOS rate estimator with reset on target switch.

    Returns (0, 0) on the first tick and on the first tick after the target
    index changes (differencing across a switch is meaningless).
    """

    def __init__(self) -> None:
        self._prev: LookaheadGeometry | None = None
        self._prev_index: int | None = None

    def reset(self) -> None:
        self._prev = None
        self._prev_index = None

    def update(self, geom: LookaheadGeometry, target_index: int, dt: float) -> tuple[float, float]:
        if self._prev is None or self._prev_index != target_index:
            self._prev = geom
            self._prev_index = target_index
            return (0.0, 0.0)
        rates = finite_difference_los(geom, self._prev, dt)
        self._prev = geom
        return rates

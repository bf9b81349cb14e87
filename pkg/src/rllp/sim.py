"""Closed-loop scenario runner, metrics and deterministic logging.

One scenario = one sequential tick loop at a fixed control period. Per tick:
hold-or-resample the disturbance, manage the virtual target (held until
captured or passed, then reselected through the constrained selector),
compute the look-ahead geometry and LOS rates, dispatch to the controller
variant, integrate the kinematics, log. Everything is deterministic given
the seed.
"""

from __future__ import annotations

import ast
import io
import json
import math
import statistics
from dataclasses import dataclass, field, replace

import numpy as np

from . import guidance, qp
from .config import GuidanceConfig
from .kinematics import DisturbanceSample, UavState, sample_disturbance, step
from .path import (
    LosRateDifferentiator,
    PathExhausted,
    TargetSelection,
    WaypointPath,
    compute_geometry,
    generate_nonsmooth_path,
    load_path_csv,
    select_target_constrained,
)

CONTROLLERS = ("rllp", "rllp_fixed_comp", "rllp_optimal")

CSV_COLUMNS = (
    "t,x,y,z,chi,gamma,target_idx,eta_lat,eta_lon,a_yc,a_zc,"
    "e_d,k1,k2,qp_status,clipped,d_chi,d_gamma"
)


class ConfigError(Exception):
    """Scenario configuration file is missing, malformed or inconsistent."""


class EmptyRun(Exception):
    """Metrics requested over an empty record list."""


@dataclass(frozen=True)
class Scenario:
    path: WaypointPath
    cfg: GuidanceConfig
    controller: str
    l_d: float
    seed: int
    duration: float
    initial_state: UavState
    dt: float = 0.1
    disturbance_hold: int = 5

    def __post_init__(self) -> None:
        if self.controller not in CONTROLLERS:
            raise ValueError(f"controller must be one of {CONTROLLERS}, got {self.controller!r}")
        if self.dt <= 0.0 or self.duration <= 0.0:
            raise ValueError("dt and duration must be > 0")
        if self.disturbance_hold < 1:
            raise ValueError("disturbance_hold must be >= 1")
        if self.l_d < 0.0:
            raise ValueError("l_d must be >= 0")


@dataclass(frozen=True)
class TickRecord:
    t: float
    x: float
    y: float
    z: float
    chi: float
    gamma: float
    target_idx: int
    eta_lat: float
    eta_lon: float
    a_yc: float
    a_zc: float
    e_d: float
    k1: float
    k2: float
    qp_status: str
    clipped: bool
    d_chi: float
    d_gamma: float


@dataclass(frozen=True)
class SeriesStats:
    mean: float
    std: float   # population convention
    min: float
    max: float

    @classmethod
    def of(cls, values: np.ndarray) -> "SeriesStats":
        return cls(
            float(np.mean(values)),
            float(np.std(values)),
            float(np.min(values)),
            float(np.max(values)),
        )

    def as_dict(self) -> dict:
        return {"mean": self.mean, "std": self.std, "min": self.min, "max": self.max}


@dataclass(frozen=True)
class RunMetrics:
    eta_lon: SeriesStats
    eta_lat: SeriesStats
    a_yc: SeriesStats
    a_zc: SeriesStats
    ed_convergence_median: float | None   # seconds; math.inf when legs stall
    ed_convergence_times: list[float] = field(default_factory=list)
    legs: int = 0
    converged_legs: int = 0
    ticks: int = 0
    window: tuple[float, float] | None = None

    def as_dict(self) -> dict:
        med = self.ed_convergence_median
        return {
            "ticks": self.ticks,
            "window": list(self.window) if self.window else None,
            "eta_lon": self.eta_lon.as_dict(),
            "eta_lat": self.eta_lat.as_dict(),
            "a_yc": self.a_yc.as_dict(),
            "a_zc": self.a_zc.as_dict(),
            "ed_convergence": {
                "median_s": None if med is None or math.isinf(med) else med,
                "legs": self.legs,
                "converged_legs": self.converged_legs,
                "times_s": [t for t in self.ed_convergence_times if math.isfinite(t)],
            },
        }


def _fallback_gains(cfg: GuidanceConfig) -> guidance.CompensationGains:
    floor = (1.0 + cfg.epsilon) * cfg.l_d / 2.0
    return guidance.CompensationGains(max(cfg.comp_k1, floor), max(cfg.comp_k2, floor))


def _optimal_gains(geom, state, cfg, c_dots, prev_form, dt):
    """QP gains with the documented degradation ladder.

    QP at cfg.k_q -> decremental k_q search + QP retry -> fixed gains (only
    while the compensation box can still dominate the disturbance) -> pure
    base law. Returns (gains | None, status, k_q_used, affine form | None);
    None gains means pure base law.
    """
    if not geom.theta_defined:
        return None, "fallback_rllp", cfg.k_q, None
    if abs(geom.sin_theta) < cfg.eps_theta or abs(geom.cos_theta) < cfg.eps_theta:
        # One compensation axis is singular; no QP, but fixed gains still act
        # on the healthy axis if the box is feasible at all.
        box = guidance.compensation_box(geom, state, cfg, c_dots[0], c_dots[1])
        feasible, _ = guidance.check_feasibility(geom, box, cfg.l_d)
        if feasible:
            return _fallback_gains(cfg), "fallback_fixed", cfg.k_q, None
        return None, "fallback_rllp", cfg.k_q, None
    problem, form = qp.build_problem(geom, state, cfg, c_dots, prev_form, dt)
    sol = qp.solve(problem, cfg.qp_tol, cfg.qp_max_iter)
    if sol.status == "optimal":
        return guidance.CompensationGains(float(sol.k[0]), float(sol.k[1])), "optimal", cfg.k_q, form
    kq2, ok = guidance.decremental_kq_search(geom, state, cfg, c_dots[0], c_dots[1])
    if not ok:
        # Even the floor gain cannot shift the box into feasibility: any
        # compensation would just chatter against the clip bounds.
        return None, "fallback_rllp", cfg.k_q, form
    if kq2 < cfg.k_q:
        problem2, form2 = qp.build_problem(geom, state, cfg, c_dots, prev_form, dt, k_q=kq2)
        sol2 = qp.solve(problem2, cfg.qp_tol, cfg.qp_max_iter)
        if sol2.status == "optimal":
            gains = guidance.CompensationGains(float(sol2.k[0]), float(sol2.k[1]))
            return gains, "optimal_decr", kq2, form2
    return _fallback_gains(cfg), "fallback_fixed", kq2, form


def run(scenario: Scenario) -> tuple[list[TickRecord], RunMetrics]:
    """Execute one scenario; returns the tick log and its metrics.

    PathExhausted ends the run normally; DegenerateGamma propagates (the
    flight condition left the model's validity region).
    """
    cfg = replace(scenario.cfg, l_d=scenario.l_d)
    rng = np.random.default_rng(scenario.seed)
    state = scenario.initial_state
    path = scenario.path
    last = len(path) - 1
    dist = DisturbanceSample(0.0, 0.0)
    differ = LosRateDifferentiator()
    target: TargetSelection | None = None
    prev_form = None
    records: list[TickRecord] = []
    n_ticks = round(scenario.duration / scenario.dt)

    for k in range(n_ticks):
        t = k * scenario.dt
        if k % scenario.disturbance_hold == 0:
            dist = sample_disturbance(rng, scenario.l_d, cfg.disturbance_mode)

        # Hold the virtual target until captured or passed, then advance.
        reselect = target is None
        prev_index = 0
        if target is not None:
            dx = target.point[0] - state.x_p
            dy = target.point[1] - state.y_p
            dz = target.point[2] - state.z_p
            d = math.sqrt(dx * dx + dy * dy + dz * dz)
            vx, vy, vz = state.velocity_direction()
            passed = dx * vx + dy * vy + dz * vz <= 0.0
            if d <= cfg.capture_radius or passed:
                reselect = True
                prev_index = min(target.index + 1, last)
        if reselect:
            try:
                target = select_target_constrained(state, path, cfg, prev_index)
            except PathExhausted:
                break
            prev_form = None

        geom = compute_geometry(state, target.point)
        c_dots = differ.update(geom, target.index, scenario.dt)
        e_d = math.dist(state.position, target.point)

        base = guidance.base_law(geom, state, cfg)
        k1 = k2 = 0.0
        qp_status = "-"
        clipped = False
        # The compensation layer is valid only inside |eta| <= delta on both
        # axes (the finite-time argument's domain); outside it the base law
        # alone steers back in.
        in_domain = abs(geom.eta_lat) <= cfg.delta and abs(geom.eta_lon) <= cfg.delta
        if scenario.controller == "rllp" or not in_domain:
            cmd = base
            if scenario.controller == "rllp_optimal":
                qp_status = "fallback_rllp"
                prev_form = None
        else:
            if scenario.controller == "rllp_fixed_comp":
                gains = guidance.CompensationGains(cfg.comp_k1, cfg.comp_k2)
                kq_used = cfg.k_q
            else:
                gains, qp_status, kq_used, prev_form = _optimal_gains(
                    geom, state, cfg, c_dots, prev_form, scenario.dt
                )
            if gains is None:
                cmd = base
            else:
                if kq_used != cfg.k_q:
                    base = guidance.base_law(geom, state, cfg, k_q=kq_used)
                comp = guidance.typical_compensation(geom, gains, cfg.eps_theta)
                cmd, terms = guidance.clip_and_assemble(
                    base, comp.f_chi, comp.f_gamma, c_dots, state, geom, cfg, k_q=kq_used
                )
                k1, k2 = gains.k1, gains.k2
                clipped = terms.clipped

        records.append(TickRecord(
            t, state.x_p, state.y_p, state.z_p, state.chi, state.gamma,
            target.index, geom.eta_lat, geom.eta_lon, cmd.a_yc, cmd.a_zc,
            e_d, k1, k2, qp_status, clipped, dist.d_chi, dist.d_gamma,
        ))
        state = step(state, cmd, dist, scenario.dt)

    return records, compute_metrics(records)


def compute_metrics(
    records: list[TickRecord], window: tuple[float, float] | None = None
) -> RunMetrics:
    """Series statistics plus per-target-leg convergence of the distance error.

    A leg is a maximal run of ticks pursuing one target index. A leg counts
    as converged at the first time its distance error drops below 5% of its
    starting value; complete legs that never converge contribute +inf to the
    median, truncated unconverged legs are skipped.
    """
    if not records:
        raise EmptyRun("no records")
    recs = records
    if window is not None:
        lo, hi = window
        recs = [r for r in records if lo <= r.t <= hi]
        if not recs:
            raise EmptyRun(f"no records inside window {window}")

    eta_lon = np.array([r.eta_lon for r in recs])
    eta_lat = np.array([r.eta_lat for r in recs])
    a_yc = np.array([r.a_yc for r in recs])
    a_zc = np.array([r.a_zc for r in recs])

    times: list[float] = []
    converged = 0
    n_legs = 0
    i = 0
    n = len(recs)
    while i < n:
        j = i
        while j < n and recs[j].target_idx == recs[i].target_idx:
            j += 1
        complete = j < n  # a switch ended this leg inside the window
        ed0 = recs[i].e_d
        conv_t = None
        if ed0 > 0.0:
            for r in recs[i:j]:
                if r.e_d < 0.05 * ed0:
                    conv_t = r.t - recs[i].t
                    break
        if conv_t is not None:
            times.append(conv_t)
            converged += 1
            n_legs += 1
        elif complete:
            times.append(math.inf)
            n_legs += 1
        i = j

    median = statistics.median(times) if times else None
    return RunMetrics(
        eta_lon=SeriesStats.of(eta_lon),
        eta_lat=SeriesStats.of(eta_lat),
        a_yc=SeriesStats.of(a_yc),
        a_zc=SeriesStats.of(a_zc),
        ed_convergence_median=median,
        ed_convergence_times=times,
        legs=n_legs,
        converged_legs=converged,
        ticks=len(recs),
        window=window,
    )


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------

def _fmt(v: float) -> str:
    return f"{v:.9g}"


def write_log_csv(records: list[TickRecord], fileobj) -> None:
    fileobj.write(CSV_COLUMNS + "\n")
    for r in records:
        fileobj.write(
            f"{_fmt(r.t)},{_fmt(r.x)},{_fmt(r.y)},{_fmt(r.z)},{_fmt(r.chi)},"
            f"{_fmt(r.gamma)},{r.target_idx},{_fmt(r.eta_lat)},{_fmt(r.eta_lon)},"
            f"{_fmt(r.a_yc)},{_fmt(r.a_zc)},{_fmt(r.e_d)},{_fmt(r.k1)},{_fmt(r.k2)},"
            f"{r.qp_status},{int(r.clipped)},{_fmt(r.d_chi)},{_fmt(r.d_gamma)}\n"
        )


def log_csv_text(records: list[TickRecord]) -> str:
    buf = io.StringIO()
    write_log_csv(records, buf)
    return buf.getvalue()


def read_log_csv(fileobj) -> list[TickRecord]:
    header = fileobj.readline().strip()
    if header != CSV_COLUMNS:
        raise ConfigError(f"unexpected log header: {header!r}")
    out = []
    for line in fileobj:
        if not line.strip():
            continue
        p = line.rstrip("\n").split(",")
        out.append(TickRecord(
            t=float(p[0]), x=float(p[1]), y=float(p[2]), z=float(p[3]),
            chi=float(p[4]), gamma=float(p[5]), target_idx=int(p[6]),
            eta_lat=float(p[7]), eta_lon=float(p[8]), a_yc=float(p[9]),
            a_zc=float(p[10]), e_d=float(p[11]), k1=float(p[12]), k2=float(p[13]),
            qp_status=p[14], clipped=bool(int(p[15])), d_chi=float(p[16]),
            d_gamma=float(p[17]),
        ))
    return out


def metrics_json(metrics: RunMetrics, extra: dict | None = None) -> str:
    doc = dict(extra or {})
    doc.update(metrics.as_dict())
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# --------------------------------------------------------------------------
# Scenario configuration files
# --------------------------------------------------------------------------

_ALLOWED_NODES = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.Constant, ast.Load,
    ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd, ast.Name,
)


def eval_number(text: str) -> float:
    """Evaluate a numeric config expression such as `pi/15` or `-0.5`."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"bad numeric expression {text!r}: {exc}") from None
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise ConfigError(f"disallowed syntax in numeric expression {text!r}")
        if isinstance(node, ast.Name) and node.id != "pi":
            raise ConfigError(f"unknown name {node.id!r} in expression {text!r}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise ConfigError(f"non-numeric constant in expression {text!r}")
    return float(eval(compile(tree, "<config>", "eval"), {"__builtins__": {}}, {"pi": math.pi}))


_GUIDANCE_KEYS = {
    "k_q", "delta", "tau_hat", "q_l", "a_yc_min", "a_yc_max", "a_zc_min",
    "a_zc_max", "a_bzc_min", "a_bzc_max", "phi_c_min", "phi_c_max",
    "u_dot_min", "u_dot_max", "epsilon", "k_q_floor", "k_q_decay",
    "comp_k1", "comp_k2", "capture_radius", "r_weight", "qp_tol",
}
_SCENARIO_KEYS = {
    "controller", "l_d", "seed", "dt", "duration", "disturbance_hold",
    "disturbance_mode", "path_file", "path_seed", "path_segments",
    "path_spacing", "x0", "y0", "z0", "chi0", "gamma0", "v_g", "qp_max_iter",
}


def parse_scenario_text(text: str, base_dir: str = ".") -> Scenario:
    """Parse a key = value scenario description (angles in radians).

    Path source: either `path_file = waypoints.csv` (relative to the config
    file) or `path_seed = N` with optional `path_segments`, `path_spacing`
    for the built-in non-smooth generator.
    """
    import os

    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected `key = value`, got {line!r}")
        key, value = (s.strip() for s in stripped.split("=", 1))
        if key not in _SCENARIO_KEYS and key not in _GUIDANCE_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    def num(key: str, default: float | None = None) -> float | None:
        if key not in raw:
            return default
        return eval_number(raw[key])

    if "path_file" in raw:
        path = load_path_csv(os.path.join(base_dir, raw["path_file"]))
    elif "path_seed" in raw:
        path = generate_nonsmooth_path(
            seed=int(num("path_seed")),
            segments=int(num("path_segments", 6)),
            spacing=num("path_spacing", 200.0),
        )
    else:
        raise ConfigError("config needs either path_file or path_seed")

    cfg_kwargs: dict = {k: num(k) for k in raw if k in _GUIDANCE_KEYS}
    if "qp_max_iter" in raw:
        cfg_kwargs["qp_max_iter"] = int(num("qp_max_iter"))
    l_d = num("l_d", 0.0)
    cfg_kwargs["l_d"] = l_d
    if "disturbance_mode" in raw:
        cfg_kwargs["disturbance_mode"] = raw["disturbance_mode"]
    try:
        cfg = GuidanceConfig(**cfg_kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad guidance configuration: {exc}") from None

    v_g = num("v_g", 25.0)
    if "x0" in raw or "y0" in raw or "z0" in raw:
        pos = (num("x0", 0.0), num("y0", 0.0), num("z0", 0.0))
    else:
        pos = path.point(0)
    p1 = path.point(1)
    if "chi0" in raw:
        chi0 = num("chi0")
    else:
        chi0 = math.atan2(p1[1] - pos[1], p1[0] - pos[0])
    if "gamma0" in raw:
        gamma0 = num("gamma0")
    else:
        gamma0 = math.atan2(p1[2] - pos[2], math.hypot(p1[0] - pos[0], p1[1] - pos[1]))
    try:
        state0 = UavState(pos[0], pos[1], pos[2], chi0, gamma0, v_g)
        scenario = Scenario(
            path=path,
            cfg=cfg,
            controller=raw.get("controller", "rllp"),
            l_d=l_d,
            seed=int(num("seed", 0)),
            duration=num("duration", 120.0),
            initial_state=state0,
            dt=num("dt", 0.1),
            disturbance_hold=int(num("disturbance_hold", 5)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return scenario


def load_scenario(filename) -> Scenario:
    import os

    try:
        with open(filename, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {filename}: {exc}") from None
    return parse_scenario_text(text, base_dir=os.path.dirname(os.path.abspath(filename)))

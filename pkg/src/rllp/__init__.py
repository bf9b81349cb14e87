"""Robust longitudinal-lateral look-ahead pursuit (RLLP) guidance.

3-DOF fixed-wing path following under bounded angular-rate disturbances:
the base pursuit law, a finite-time compensation layer with saturation-aware
clipping, a per-tick convex program for the compensation gains, and a
deterministic batch simulator with CSV/JSON logging.
"""

from ._kernels import BACKEND as kernel_backend
from .config import GRAVITY, GuidanceConfig
from .guidance import (
    CompensationGains,
    CompensationTerms,
    attraction_region_bound,
    base_law,
    check_feasibility,
    clip_and_assemble,
    compensation_box,
    decremental_kq_search,
    settling_time_bound,
    typical_compensation,
)
from .kinematics import (
    AccelCommand,
    AttitudeCommand,
    DegenerateGamma,
    DisturbanceSample,
    UavState,
    attitude_to_command,
    command_to_attitude,
    sample_disturbance,
    step,
)
from .path import (
    DegenerateLos,
    LookaheadGeometry,
    LosRateDifferentiator,
    PathExhausted,
    TargetSelection,
    WaypointPath,
    compute_geometry,
    generate_nonsmooth_path,
    load_path_csv,
    save_path_csv,
    select_target_basic,
    select_target_constrained,
)
from .qp import QpProblem, QpSolution, SingularTheta, brute_force_oracle, build_problem, solve
from .sim import RunMetrics, Scenario, TickRecord, compute_metrics, run

__version__ = "0.1.0"

__all__ = [
    "AccelCommand",
    "AttitudeCommand",
    "CompensationGains",
    "CompensationTerms",
    "DegenerateGamma",
    "DegenerateLos",
    "DisturbanceSample",
    "GRAVITY",
    "GuidanceConfig",
    "LookaheadGeometry",
    "LosRateDifferentiator",
    "PathExhausted",
    "QpProblem",
    "QpSolution",
    "RunMetrics",
    "Scenario",
    "SingularTheta",
    "TargetSelection",
    "TickRecord",
    "UavState",
    "WaypointPath",
    "attitude_to_command",
    "attraction_region_bound",
    "base_law",
    "brute_force_oracle",
    "build_problem",
    "check_feasibility",
    "clip_and_assemble",
    "command_to_attitude",
    "compensation_box",
    "compute_geometry",
    "compute_metrics",
    "decremental_kq_search",
    "generate_nonsmooth_path",
    "kernel_backend",
    "load_path_csv",
    "run",
    "sample_disturbance",
    "save_path_csv",
    "select_target_basic",
    "select_target_constrained",
    "settling_time_bound",
    "solve",
    "step",
    "typical_compensation",
]

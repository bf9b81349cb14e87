import math

import numpy as np
import pytest

from rllp.config import GuidanceConfig
from rllp.kinematics import UavState
from rllp.path import WaypointPath


@pytest.fixture
def cfg():
    return GuidanceConfig()


@pytest.fixture
def level_state():
    """Level flight at the origin heading +x at the reference airspeed."""
    return UavState(0.0, 0.0, 0.0, 0.0, 0.0, 25.0)


@pytest.fixture
def straight_path():
    """200 waypoints along +x at 1 m spacing, starting at the origin."""
    pts = np.zeros((201, 3))
    pts[:, 0] = np.arange(201.0)
    return WaypointPath.from_points(pts)


def initial_state_on(path, v_g=25.0):
    p0, p1 = path.point(0), path.point(1)
    chi = math.atan2(p1[1] - p0[1], p1[0] - p0[0])
    gamma = math.atan2(p1[2] - p0[2], math.hypot(p1[0] - p0[0], p1[1] - p0[1]))
    return UavState(p0[0], p0[1], p0[2], chi, gamma, v_g)

import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from kerrwra import scenarios
from kerrwra.wigner import integrate_wra

settings.register_profile(
    "suite", deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")


# Trajectories and rate quadratures are the expensive objects; build
# each scenario grid point once per session and share it.
_CACHE = {}


def build_point(name, ratio):
    key = (name, ratio)
    if key not in _CACHE:
        scen = scenarios.get_preset(name)
        _CACHE[key] = scen.build(ratio)
    return _CACHE[key]


_TRACES = {}


def trace_point(name, ratio, **kw):
    key = (name, ratio, tuple(sorted(kw.items())))
    if key not in _TRACES:
        traj, field = build_point(name, ratio)
        _TRACES[key] = integrate_wra(traj, field, **kw)
    return _TRACES[key]


@pytest.fixture(scope="session")
def earth_polar_point():
    return build_point("earth_polar", 1.0)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)

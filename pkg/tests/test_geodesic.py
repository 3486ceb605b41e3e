import math

import numpy as np
import pytest
from scipy.optimize import brentq

from kerrwra.geodesic import (
    StopCondition,
    conservation_drift,
    integrate,
    launch_with_ratio,
    norm_drift,
)
from kerrwra.spacetime import (
    Event,
    KerrParams,
    KerrParams as KP,
    metric_at,
    radial_potential,
    static_tetrad,
    unit_system,
)

FLAT = KerrParams(0.0, 0.0)
EARTH = KerrParams(unit_system("earth")["mass"], 0.0)
KERR = KerrParams(1.0, 0.6)


def _to_cartesian(ev):
    st_, ct = math.sin(ev.theta), math.cos(ev.theta)
    return np.array([ev.r * st_ * math.cos(ev.phi),
                     ev.r * st_ * math.sin(ev.phi),
                     ev.r * ct])


def test_flat_space_straight_line():
    """With no mass the path must be a straight line in Cartesian
    coordinates, traversed at coordinate speed 1."""
    c, ev0, sr, sth = launch_with_ratio(FLAT, 1.0e7, 0.7, "equatorial")
    traj = integrate(FLAT, c, ev0, sr, sth, StopCondition("radius", 5.0e7))
    x0 = _to_cartesian(ev0)
    k0 = traj.momentum_at(0.0)
    # Cartesian direction from the spherical components at launch
    ev = traj.event_at(0.0)
    st_, ct = math.sin(ev.theta), math.cos(ev.theta)
    sp, cp = math.sin(ev.phi), math.cos(ev.phi)
    kr, kth,ated = k0[1], k0[2] * ev.r, k0[3] * ev.r * st_
    d = np.array([st_ * cp * kr + ct * cp * kth - sp * ated,
                  st_ * sp * kr + ct * sp * kth + cp * ated,
                  ct * kr - st_ * kth])
    for frac in (0.25, 0.5, 0.75, 1.0):
        xi = frac * traj.xi_end
        evx = traj.event_at(xi)
        want = x0 + d * xi
        got = _to_cartesian(evx)
        assert np.allclose(got, want, rtol=1e-10, atol=1e-3)
        # coordinate time advances by the spatial distance
        assert evx.t - ev0.t == pytest.approx(
            np.linalg.norm(want - x0), rel=1e-10)


def test_conservation_and_norm_drift():
    for params, r0, rstop in ((EARTH, 6.371e6, 4.2e7), (KERR, 6.0, 40.0)):
        c, ev0, sr, sth = launch_with_ratio(params, r0, -0.8, "equatorial")
        traj = integrate(params, c, ev0, sr, sth,
                         StopCondition("radius", rstop))
        assert conservation_drift(traj) < 1e-9
        assert norm_drift(traj) < 1e-9


def test_radial_turning_point():
    """An ingoing photon with enough angular momentum turns around at
    the root of the radial potential."""
    c, ev0, sr, sth = launch_with_ratio(KERR, 20.0, 3.0, "equatorial",
                                        outgoing=False)
    assert sr == -1
    r_turn = brentq(lambda r: radial_potential(KERR, c, r), 3.0, 19.9)
    traj = integrate(KERR, c, ev0, sr, sth, StopCondition("radius", 30.0))
    from scipy.optimize import minimize_scalar
    res = minimize_scalar(lambda xi: traj.event_at(xi).r,
                          bounds=(0.0, traj.xi_end), method="bounded",
                          options={"xatol": 1e-10})
    assert res.fun == pytest.approx(r_turn, rel=1e-9)
    assert res.fun >= r_turn - 1e-7  # never dips below the barrier
    assert traj.event_at(traj.xi_end).r > ev0.r  # came back out
    assert conservation_drift(traj) < 1e-9


def test_polar_turning_point():
    """Launch out of the equatorial plane; theta turns where the polar
    potential vanishes and the trajectory stays smooth through it."""
    c, ev0, sr, sth = launch_with_ratio(KERR, 12.0, 1.5, "polar")
    traj = integrate(KERR, c, ev0, sr, sth, StopCondition("radius", 80.0))
    ths = [traj.event_at(xi).theta
           for xi in np.linspace(0.0, traj.xi_end, 400)]
    assert max(ths) > ev0.theta  # moved towards the pole and turned
    assert conservation_drift(traj) < 1e-9
    assert norm_drift(traj) < 1e-9


def test_stop_conditions():
    c, ev0, sr, sth = launch_with_ratio(KERR, 10.0, 0.5, "equatorial")
    tr = integrate(KERR, c, ev0, sr, sth, StopCondition("radius", 25.0))
    assert tr.event_at(tr.xi_end).r == pytest.approx(25.0, rel=1e-10)
    tr = integrate(KERR, c, ev0, sr, sth, StopCondition("affine", 7.0))
    assert tr.xi_end == pytest.approx(7.0)
    tr = integrate(KERR, c, ev0, sr, sth, StopCondition("phi", 0.3))
    assert tr.event_at(tr.xi_end).phi == pytest.approx(0.3, abs=1e-9)
    with pytest.raises(ValueError):
        integrate(KERR, c, ev0, sr, sth, StopCondition("affine", -1.0))


def test_launch_ratio_reproduced():
    """The local static-frame transverse/radial momentum ratio at the
    start must equal the requested ratio."""
    for ratio in (0.3, 1.0, -2.0):
        c, ev0, sr, sth = launch_with_ratio(EARTH, 6.371e6, ratio,
                                            "equatorial")
        traj = integrate(EARTH, c, ev0, sr, sth,
                         StopCondition("affine", 1.0e5))
        k = traj.momentum_at(0.0)
        g = metric_at(EARTH, ev0)
        tet = static_tetrad(EARTH, ev0)
        khat = np.linalg.solve(tet, k)
        assert khat[3] / khat[1] == pytest.approx(ratio, rel=1e-10)
        assert abs(khat[2]) < 1e-12 * khat[0]
        assert float(k @ g @ k) == pytest.approx(0.0, abs=1e-12)


def test_energy_rescaling_invariance():
    """Scaling the Killing energy only reparameterizes the path."""
    c1, ev0, sr, sth = launch_with_ratio(KERR, 10.0, 0.8, "equatorial",
                                         energy=1.0)
    c2, _, _, _ = launch_with_ratio(KERR, 10.0, 0.8, "equatorial",
                                    energy=2.5)
    t1 = integrate(KERR, c1, ev0, sr, sth, StopCondition("radius", 30.0))
    t2 = integrate(KERR, c2, ev0, sr, sth, StopCondition("radius", 30.0))
    assert t2.xi_end == pytest.approx(t1.xi_end / 2.5, rel=1e-9)
    for frac in (0.3, 0.9):
        a = t1.event_at(frac * t1.xi_end)
        b = t2.event_at(frac * t2.xi_end)
        assert a.r == pytest.approx(b.r, rel=1e-9)
        assert a.phi == pytest.approx(b.phi, rel=1e-9, abs=1e-12)

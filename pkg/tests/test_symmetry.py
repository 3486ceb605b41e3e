import math

import numpy as np
import pytest

from conftest import build_point, trace_point
from kerrwra.errors import AntipodalSingularity
from kerrwra.spacetime import Event, KerrParams, metric_at, unit_system, ETA
from kerrwra.symmetry import (
    asymmetry_integrand,
    delta_psi_azimuth_flip,
    delta_psi_time_reversal,
    pt_check,
    reversed_iwra_rate,
    schwarzschild_lambda_closed_form,
    transform_lambda,
    TIME_REVERSAL,
    SPACE_INVERSION,
)
from kerrwra.tetrad import TetradField
from kerrwra.wigner import iwra_rate, lambda_matrix


def _random_generator(rng):
    A = rng.normal(size=(4, 4))
    return ETA @ (A - A.T) / 2.0


def _random_direction(rng):
    n = rng.normal(size=3)
    n /= np.linalg.norm(n)
    if abs(n[2]) > 0.98:
        n[2] = 0.5 * np.sign(n[2])
        n /= np.linalg.norm(n)
    return n


def test_transform_lambda_blocks():
    rng = np.random.default_rng(0)
    for _ in range(50):
        L = _random_generator(rng)
        T = transform_lambda(L, TIME_REVERSAL)
        P = transform_lambda(L, SPACE_INVERSION)
        # rotation block flips under T, boost block under P
        assert np.allclose(T[1:, 1:], -L[1:, 1:])
        assert np.allclose(T[0, :], L[0, :])
        assert np.allclose(P[0, 1:], -L[0, 1:])
        assert np.allclose(P[1:, 1:], L[1:, 1:])
        # composing both negates everything
        assert np.allclose(transform_lambda(T, SPACE_INVERSION),
                           transform_lambda(L, "pt"))
        # eta-antisymmetry survives each transform
        for M in (T, P):
            ML = ETA @ M
            assert np.max(np.abs(ML + ML.T)) < 1e-14
    with pytest.raises(ValueError):
        transform_lambda(np.eye(4), "bogus")


def test_reversed_rate_is_forward_rate_of_transformed_photon():
    """Composition identity: the reversed rate equals the plain rate
    with the generator T-transformed and the direction negated."""
    rng = np.random.default_rng(1)
    for _ in range(200):
        L = _random_generator(rng)
        n = _random_direction(rng)
        lhs = reversed_iwra_rate(L, n)
        rhs = sum(iwra_rate(transform_lambda(L, TIME_REVERSAL), -n))
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_asymmetry_integrand_closes_the_difference():
    """rot + boost brackets equal forward rate plus reversed rate
    (reversed path measure runs backwards)."""
    rng = np.random.default_rng(2)
    for _ in range(200):
        L = _random_generator(rng)
        n = _random_direction(rng)
        rot, boost = asymmetry_integrand(L, n)
        want = sum(iwra_rate(L, n)) + reversed_iwra_rate(L, n)
        assert rot + boost == pytest.approx(want, abs=1e-12)


def test_antipodal_direction_raises():
    L = _random_generator(np.random.default_rng(3))
    with pytest.raises(AntipodalSingularity):
        reversed_iwra_rate(L, np.array([1e-8, 1e-8, 1.0]))


def test_dual_route_agreement():
    traj, field = build_point("earth_polar", 1.0)
    rep = delta_psi_time_reversal(traj, field)
    assert abs(rep.delta_psi - rep.delta_psi_integrand) < 1e-9
    assert rep.delta_psi == pytest.approx(
        rep.psi_forward - rep.psi_transformed)
    assert rep.integrand_breakdown.shape == (len(rep.xi_nodes), 2)
    # the asymmetry is a real observable here
    assert abs(rep.delta_psi) > 1e-6


def test_azimuth_flip_equals_time_reversal_on_schwarzschild():
    """With zero spin the mirror launch accumulates exactly the
    time-reversed angle, so both differences coincide."""
    pos = build_point("earth_polar", 1.0)
    neg = build_point("earth_polar", -1.0)
    flip = delta_psi_azimuth_flip((pos[0], neg[0]), pos[1])
    trev = delta_psi_time_reversal(pos[0], pos[1])
    assert flip.delta_psi == pytest.approx(trev.delta_psi, abs=1e-9)
    assert flip.delta_psi_integrand == pytest.approx(
        trev.delta_psi_integrand, abs=1e-12)


def test_trivial_gauge_kills_all_differences():
    traj, field = build_point("trivial_gauge", 1.0)
    rep = delta_psi_time_reversal(traj, field)
    assert abs(rep.delta_psi) < 1e-10
    assert abs(rep.delta_psi_integrand) < 1e-10
    tr = trace_point("trivial_gauge", 1.0)
    assert abs(tr.psi_residual) < 1e-10


def test_closed_form_generator_schwarzschild():
    """Azimuth-driven generator entries against the frozen-leg
    numerical pipeline at 50 random events."""
    pe = KerrParams(unit_system("earth")["mass"], 0.0)
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(50):
        th = rng.uniform(0.3, math.pi - 0.3)
        r = rng.uniform(1.0e7, 5.0e7)
        field = TetradField(pe, family="polar_orbit",
                            quantization="orbit_orthogonal",
                            orbit_radius=r, transported=False,
                            prograde=False)
        ev = Event(0.0, r, th, rng.uniform(0.0, 2.0 * math.pi))
        kphi = rng.uniform(0.5, 2.0) * 1e-8
        g = metric_at(pe, ev)
        kt = math.sqrt(-g[3, 3] * kphi ** 2 / g[0, 0])
        k = np.array([kt, 0.0, 0.0, kphi])
        L = lambda_matrix(field, ev, k)
        cf = schwarzschild_lambda_closed_form(pe, ev, kphi)
        rel = max(abs(L[3][1] - cf[0]), abs(L[3][2] - cf[1])) / abs(kphi)
        worst = max(worst, rel)
    assert worst < 1e-6


def test_closed_form_requires_schwarzschild():
    kerr = KerrParams(1.0, 0.5)
    with pytest.raises(ValueError):
        schwarzschild_lambda_closed_form(kerr, Event(0.0, 10.0, 1.0, 0.0),
                                         1.0)


def test_pt_invariance_with_t_violation():
    traj, field = build_point("earth_polar", 1.0)
    rep = pt_check(traj, field, sigma=1)
    assert abs(rep.pt_violation) < 1e-9
    assert rep.pt_symmetric
    assert abs(rep.t_violation) > 1e-6
    # helicity flip flips every signed angle
    rep2 = pt_check(traj, field, sigma=-1)
    assert rep2.sigma_psi_forward == pytest.approx(-rep.sigma_psi_forward)
    assert abs(rep2.pt_violation) < 1e-9

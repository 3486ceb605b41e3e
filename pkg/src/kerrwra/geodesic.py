"""Null and timelike geodesics from the first-order Kerr equations.

The integrator advances (t, r, theta, phi) with dr and dtheta taken
from the square roots of the radial and polar potentials, carrying
explicit sign registers that flip at turning points.  Turning points
are located by solve_ivp event detection on the potentials; the
restart takes an analytic quadratic step past the root so the square
root never sees a negative argument.
"""

from dataclasses import dataclass, field
import csv
import math

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .errors import ConvergenceFailure, NegativeRadicand
from .spacetime import (
    Event,
    conserved_from_momentum,
    metric_at,
    momentum_norm,
    polar_potential,
    radial_potential,
    reconstruct_momentum,
    static_tetrad,
)

_RADICAND_SLACK = 1e-12


@dataclass(frozen=True)
class StopCondition:
    """Termination rule for the integrator.

    kind is one of 'radius', 'theta', 'affine', 'phi'.  For 'affine'
    the value is the affine-parameter length; otherwise the target
    coordinate value, crossed in either direction.
    """

    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in ("radius", "theta", "affine", "phi"):
            raise ValueError(f"unknown stop kind {self.kind!r}")


@dataclass
class Trajectory:
    """Dense-output geodesic solution.

    Piecewise solve_ivp segments between turning points, with the sign
    registers active on each segment.  Coordinates at arbitrary affine
    parameter come from the dense output; momenta are reconstructed
    on-shell from the constants of motion, so they satisfy the null or
    timelike normalization to integrator accuracy everywhere.
    """

    params: object
    consts: object
    xi_end: float
    segments: list = field(default_factory=list)  # (xi0, xi1, sol, sr, sth)

    def _segment(self, xi):
        eps = 1e-9 * max(1.0, abs(self.xi_end))
        if xi < -eps or xi > self.xi_end + eps:
            raise ValueError(f"affine parameter {xi} outside trajectory range")
        for seg in self.segments:
            if xi <= seg[1]:
                return seg
        return self.segments[-1]

    def event_at(self, xi):
        xi0, xi1, sol, _, _ = self._segment(xi)
        t, r, th, ph = sol(min(max(xi, xi0), xi1))
        return Event(t, r, th, ph)

    def signs_at(self, xi):
        _, _, _, sr, sth = self._segment(xi)
        return sr, sth

    def momentum_at(self, xi):
        ev = self.event_at(xi)
        sr, sth = self.signs_at(xi)
        return reconstruct_momentum(self.params, self.consts, ev, sr, sth)

    def sample(self, n):
        """Uniform affine grid with events; returns (xi array, list of Event)."""
        xis = np.linspace(0.0, self.xi_end, n)
        return xis, [self.event_at(x) for x in xis]

    def write_csv(self, path):
        xis, evs = self.sample(2001)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["xi", "t", "r", "theta", "phi",
                        "k_t", "k_r", "k_theta", "k_phi"])
            for x, ev in zip(xis, evs):
                k = self.momentum_at(x)
                w.writerow([f"{v:.17g}" for v in
                            (x, ev.t, ev.r, ev.theta, ev.phi, *k)])


def geodesic_rhs(params, consts, sign_r, sign_theta):
    """Right-hand side dx^mu/dxi for fixed sign registers."""
    a = params.spin
    e, lz, kk = consts.energy, consts.ang_mom, consts.carter_k
    d1 = consts.delta1
    rs = params.r_s

    def rhs(xi, y):
        _, r, th, _ = y
        sig = params.sigma(r, th)
        dlt = params.delta(r)
        s2 = math.sin(th) ** 2
        rad_r = (e * (r * r + a * a) - a * lz) ** 2 - dlt * (kk + d1 * r * r)
        sth_ = math.sin(th)
        rad_th = kk - d1 * a * a * math.cos(th) ** 2 - (a * e * sth_ - lz / sth_) ** 2
        dt = (e * ((r * r + a * a) ** 2 - dlt * a * a * s2) - rs * r * a * lz) / (dlt * sig)
        dr = sign_r * math.sqrt(max(rad_r, 0.0)) / sig
        dth = sign_theta * math.sqrt(max(rad_th, 0.0)) / sig
        dph = (rs * r * a * e + (sig - rs * r) * lz / s2) / (dlt * sig)
        return [dt, dr, dth, dph]

    return rhs


def _turning_events(params, consts):
    def ev_r(xi, y):
        return radial_potential(params, consts, y[1])

    def ev_th(xi, y):
        return polar_potential(params, consts, y[2])

    ev_r.terminal = True
    ev_r.direction = -1
    ev_th.terminal = True
    ev_th.direction = -1
    return ev_r, ev_th


def _stop_event(stop):
    if stop.kind == "radius":
        def ev(xi, y):
            return y[1] - stop.value
    elif stop.kind == "theta":
        def ev(xi, y):
            return y[2] - stop.value
    elif stop.kind == "phi":
        def ev(xi, y):
            return y[3] - stop.value
    else:
        ev = None
    if ev is not None:
        ev.terminal = True
        ev.direction = 0
    return ev


def integrate(params, consts, start, sign_r, sign_theta, stop,
              rtol=1e-12, atol=None, max_segments=64):
    """Integrate a geodesic from `start` until the stop condition.

    Returns a Trajectory.  Raises NegativeRadicand if a potential is
    negative beyond tolerance at the start, ConvergenceFailure if the
    stop condition is not reached within max_segments turning points.
    """
    scale_r = max(abs(radial_potential(params, consts, start.r)),
                  consts.energy ** 2 * start.r ** 4, 1.0)
    if radial_potential(params, consts, start.r) < -_RADICAND_SLACK * scale_r:
        raise NegativeRadicand("radial potential negative at start")
    if polar_potential(params, consts, start.theta) < -_RADICAND_SLACK * max(
            abs(consts.carter_k), 1.0):
        raise NegativeRadicand("polar potential negative at start")

    if stop.kind == "affine" and stop.value <= 0.0:
        raise ValueError("affine stop length must be positive")
    xi_max = stop.value if stop.kind == "affine" else np.inf
    if atol is None:
        atol = rtol * max(start.r, 1.0)

    traj = Trajectory(params=params, consts=consts, xi_end=0.0)
    y = [start.t, start.r, start.theta, start.phi]
    xi0 = 0.0
    sr, sth = sign_r, sign_theta
    ev_r, ev_th = _turning_events(params, consts)
    ev_stop = _stop_event(stop)

    for _ in range(max_segments):
        # A zero sign register marks a coordinate frozen at a potential
        # zero (planar motion); its turning event would fire forever.
        events = []
        if sr != 0:
            events.append(ev_r)
        if sth != 0:
            events.append(ev_th)
        if ev_stop:
            events.append(ev_stop)
        span_end = xi_max if math.isfinite(xi_max) else xi0 + 1e6 * max(
            start.r, params.mass if params.mass > 0 else start.r)
        sol = solve_ivp(geodesic_rhs(params, consts, sr, sth),
                        (xi0, span_end), y, method="DOP853",
                        rtol=rtol, atol=atol, dense_output=True,
                        events=events)
        if not sol.success:
            raise ConvergenceFailure(f"integrator failed: {sol.message}")
        xi1 = sol.t[-1]
        traj.segments.append((xi0, xi1, sol.sol, sr, sth))

        idx = 0
        hit_r = hit_th = False
        y_turn = None
        if sr != 0:
            hit_r = len(sol.t_events[idx]) > 0
            if hit_r:
                y_turn = sol.y_events[idx][0]
            idx += 1
        if sth != 0:
            hit_th = len(sol.t_events[idx]) > 0
            if hit_th and y_turn is None:
                y_turn = sol.y_events[idx][0]
            idx += 1
        hit_stop = ev_stop is not None and len(sol.t_events[idx]) > 0
        if hit_stop or (stop.kind == "affine" and xi1 >= xi_max):
            traj.xi_end = xi1
            return traj

        if not (hit_r or hit_th):
            raise ConvergenceFailure("segment ended without event or stop")

        # Step analytically past the turning point: near a simple root
        # xi_t the coordinate behaves as q(xi) ~ q_t + V'(q_t) (xi-xi_t)^2
        # / (4 Sigma^2), which stays in the allowed region on both sides.
        y = list(y_turn)
        ev = Event(*y)
        sig = params.sigma(ev.r, ev.theta)
        h = 1e-7 * max(abs(xi1 - xi0), atol)
        if hit_r:
            dv = _deriv(lambda rr: radial_potential(params, consts, rr), ev.r)
            y[1] = ev.r + dv * h * h / (4.0 * sig * sig)
            sr = -sr
        else:
            dv = _deriv(lambda tt: polar_potential(params, consts, tt), ev.theta)
            y[2] = ev.theta + dv * h * h / (4.0 * sig * sig)
            sth = -sth
        xi0 = xi1 + h
    raise ConvergenceFailure("stop condition not reached "
                             f"within {max_segments} segments")


def _deriv(f, x, h=None):
    if h is None:
        h = 1e-6 * max(abs(x), 1.0)
    return (f(x + h) - f(x - h)) / (2.0 * h)


def launch_with_ratio(params, r0, ratio, plane="equatorial",
                      theta0=None, phi0=0.0, t0=0.0,
                      energy=1.0, outgoing=True):
    """Constants of motion for a photon launched at a direction ratio.

    The photon starts at radius r0 with local static-frame momentum
    components k_transverse / k_radial = ratio.  For plane
    'equatorial' the transverse leg is the phi direction (theta =
    pi/2); for 'polar' it is the theta direction on a phi = const
    slice.  Returns (consts, start_event, sign_r, sign_theta).
    """
    if plane == "equatorial":
        th0 = math.pi / 2.0 if theta0 is None else theta0
    elif plane == "polar":
        th0 = math.pi / 2.0 if theta0 is None else theta0
    else:
        raise ValueError(f"unknown plane {plane!r}")
    ev = Event(t0, r0, th0, phi0)

    nrm = math.sqrt(1.0 + ratio * ratio)
    cr = (1.0 if outgoing else -1.0) / nrm
    ct = ratio / nrm
    local = np.array([1.0, cr, ct, 0.0]) if plane == "polar" else \
        np.array([1.0, cr, 0.0, ct])
    tet = static_tetrad(params, ev)
    k = tet @ local
    consts = conserved_from_momentum(params, ev, k, 0.0)
    # rescale to the requested Killing energy
    s = energy / consts.energy
    consts = conserved_from_momentum(params, ev, k * s, 0.0)
    tiny = 1e-14 * consts.energy / max(r0, 1.0)
    sign_r = 0 if abs(k[1] * s) < tiny else (1 if k[1] > 0 else -1)
    sign_theta = 0 if abs(k[2] * s) < tiny else (1 if k[2] > 0 else -1)
    return consts, ev, sign_r, sign_theta


def conservation_drift(traj, n=50):
    """Max relative drift of (E, Phi, K) re-extracted along the path."""
    xis = np.linspace(0.0, traj.xi_end, n)[1:-1]
    worst = 0.0
    c0 = traj.consts
    for x in xis:
        ev = traj.event_at(x)
        k = traj.momentum_at(x)
        c = conserved_from_momentum(traj.params, ev, k, c0.delta1, norm_tol=1e-6)
        for a, b in ((c.energy, c0.energy), (c.ang_mom, c0.ang_mom),
                     (c.carter_k, c0.carter_k)):
            ref = max(abs(b), 1e-30)
            worst = max(worst, abs(a - b) / ref)
    return worst


def norm_drift(traj, n=50):
    """Max |g(k,k) + delta1| / E^2 along the path."""
    xis = np.linspace(0.0, traj.xi_end, n)
    worst = 0.0
    for x in xis:
        ev = traj.event_at(x)
        k = traj.momentum_at(x)
        nrm = momentum_norm(traj.params, ev, k)
        worst = max(worst, abs(nrm + traj.consts.delta1) / traj.consts.energy ** 2)
    return worst

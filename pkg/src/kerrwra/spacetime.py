"""Kerr spacetime in Boyer-Lindquist coordinates.

Geometric units G = c = 1, lengths in meters.  Coordinate order is
(t, r, theta, phi) throughout; the metric signature is (-,+,+,+).

The line element is

    ds^2 = -(1 - r_s r / Sigma) dt^2
           - (2 r_s r a sin^2(theta) / Sigma) dt dphi
           + (Sigma / Delta) dr^2 + Sigma dtheta^2
           + (r^2 + a^2 + r_s r a^2 sin^2(theta) / Sigma) sin^2(theta) dphi^2

with Sigma = r^2 + a^2 cos^2(theta), Delta = r^2 - r_s r + a^2, and
r_s = 2 M.  Setting spin a = 0 recovers Schwarzschild; mass = 0 gives
Minkowski space in spherical coordinates.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import constants
from .errors import HorizonViolation, InvalidSpin, NotNull, NotTimelike, PoleSingularity

# Minkowski metric of a local orthonormal frame.
ETA = np.diag([-1.0, 1.0, 1.0, 1.0])

_POLE_TOL = 1e-12


@dataclass(frozen=True)
class KerrParams:
    """Mass M and spin a of the central body, both in meters (a = J/Mc)."""

    mass: float
    spin: float = 0.0

    def __post_init__(self):
        if self.mass < 0.0:
            raise InvalidSpin("mass must be non-negative")
        if abs(self.spin) > self.mass:
            raise InvalidSpin(
                f"|spin| = {abs(self.spin)} exceeds mass = {self.mass}")

    @property
    def r_s(self):
        """Schwarzschild radius 2M."""
        return 2.0 * self.mass

    @property
    def r_horizon(self):
        """Outer horizon radius M + sqrt(M^2 - a^2)."""
        return self.mass + math.sqrt(self.mass**2 - self.spin**2)

    def sigma(self, r, theta):
        return r * r + self.spin**2 * math.cos(theta) ** 2

    def delta(self, r):
        return r * r - self.r_s * r + self.spin**2


@dataclass(frozen=True)
class Event:
    """A spacetime point in Boyer-Lindquist coordinates."""

    t: float
    r: float
    theta: float
    phi: float

    def coords(self):
        return np.array([self.t, self.r, self.theta, self.phi])


def check_exterior(params, event):
    """Raise unless the event lies in the exterior region, off the axis."""
    if event.r <= params.r_horizon:
        raise HorizonViolation(
            f"r = {event.r} inside/on outer horizon r+ = {params.r_horizon}")
    if abs(math.sin(event.theta)) < _POLE_TOL:
        raise PoleSingularity(f"theta = {event.theta} too close to the axis")


def metric_at(params, event):
    """Covariant metric g_{mu nu} as a 4x4 array."""
    check_exterior(params, event)
    r, th = event.r, event.theta
    a, rs = params.spin, params.r_s
    s2 = math.sin(th) ** 2
    sig = params.sigma(r, th)
    dlt = params.delta(r)

    g = np.zeros((4, 4))
    g[0, 0] = -(1.0 - rs * r / sig)
    g[1, 1] = sig / dlt
    g[2, 2] = sig
    g[3, 3] = (r * r + a * a + rs * r * a * a * s2 / sig) * s2
    g[0, 3] = g[3, 0] = -rs * r * a * s2 / sig
    return g


def inverse_metric_at(params, event):
    return np.linalg.inv(metric_at(params, event))


def metric_derivatives_at(params, event):
    """Partial derivatives dg[lam, mu, nu] = d g_{mu nu} / d x^lam.

    Only the r (lam = 1) and theta (lam = 2) slices are nonzero; the
    metric is stationary and axisymmetric.
    """
    check_exterior(params, event)
    r, th = event.r, event.theta
    a, rs = params.spin, params.r_s
    sth, cth = math.sin(th), math.cos(th)
    s2 = sth * sth
    sig = params.sigma(r, th)
    dlt = params.delta(r)
    dsig_r = 2.0 * r
    dsig_th = -2.0 * a * a * sth * cth
    ddlt_r = 2.0 * r - rs

    dg = np.zeros((4, 4, 4))

    # g_tt = -1 + rs r / Sigma
    dg[1, 0, 0] = rs * (sig - r * dsig_r) / sig**2
    dg[2, 0, 0] = -rs * r * dsig_th / sig**2

    # g_rr = Sigma / Delta
    dg[1, 1, 1] = (dsig_r * dlt - sig * ddlt_r) / dlt**2
    dg[2, 1, 1] = dsig_th / dlt

    # g_thth = Sigma
    dg[1, 2, 2] = dsig_r
    dg[2, 2, 2] = dsig_th

    # g_tphi = -rs a r sin^2(theta) / Sigma
    dg[1, 0, 3] = dg[1, 3, 0] = -rs * a * s2 * (sig - r * dsig_r) / sig**2
    dg[2, 0, 3] = dg[2, 3, 0] = (
        -rs * a * r * (2.0 * sth * cth * sig - s2 * dsig_th) / sig**2)

    # g_phiphi = (r^2 + a^2) sin^2 + rs r a^2 sin^4 / Sigma
    dg[1, 3, 3] = 2.0 * r * s2 + rs * a * a * s2 * s2 * (sig - r * dsig_r) / sig**2
    dg[2, 3, 3] = (r * r + a * a) * 2.0 * sth * cth + rs * r * a * a * (
        4.0 * s2 * sth * cth * sig - s2 * s2 * dsig_th) / sig**2
    return dg


def christoffel_at(params, event):
    """Connection coefficients Gamma^mu_{nu lam}, shape (4, 4, 4)."""
    ginv = inverse_metric_at(params, event)
    dg = metric_derivatives_at(params, event)
    # Gamma^m_{n l} = 1/2 g^{m r} (d_n g_{r l} + d_l g_{r n} - d_r g_{n l})
    return 0.5 * np.einsum(
        "mr,nrl->mnl",
        ginv,
        dg.transpose(0, 1, 2) + dg.transpose(2, 1, 0) - dg.transpose(1, 0, 2))


@dataclass(frozen=True)
class ConservedQuantities:
    """Constants of geodesic motion in Kerr.

    energy and ang_mom are the Killing-vector constants E = -p_t and
    Phi = p_phi.  carter_k is the quadratic constant K built from the
    Killing-Yano tensor; carter_c = K - (Phi - a E)^2 vanishes for
    equatorial motion.  delta1 is 0 for null and 1 for timelike
    worldlines (affine parameter normalized to proper time).
    """

    energy: float
    ang_mom: float
    carter_k: float
    delta1: float

    def carter_c(self, spin):
        return self.carter_k - (self.ang_mom - spin * self.energy) ** 2


def momentum_norm(params, event, k):
    g = metric_at(params, event)
    return float(k @ g @ k)


def conserved_from_momentum(params, event, k, delta1, norm_tol=1e-8):
    """Extract (E, Phi, K) from a momentum/velocity vector at an event.

    The norm is checked against -delta1 relative to the energy scale;
    a null vector failing the check raises NotNull, a unit timelike
    vector raises NotTimelike.
    """
    g = metric_at(params, event)
    p = g @ np.asarray(k, dtype=float)
    energy = -p[0]
    ang_mom = p[3]

    nrm = float(k @ p)
    scale = max(energy * energy, 1.0e-300)
    if abs(nrm + delta1) / scale > norm_tol:
        exc = NotTimelike if delta1 else NotNull
        raise exc(f"norm residual {nrm + delta1:.3e} exceeds tolerance")

    a = params.spin
    cth = math.cos(event.theta)
    s2 = math.sin(event.theta) ** 2
    carter_c = p[2] ** 2 + cth * cth * (
        a * a * (delta1 - energy * energy) + ang_mom * ang_mom / s2)
    carter_k = carter_c + (ang_mom - a * energy) ** 2
    return ConservedQuantities(energy, ang_mom, carter_k, delta1)


def radial_potential(params, consts, r):
    """R(r) = (E(r^2+a^2) - a Phi)^2 - Delta (K + delta1 r^2)."""
    a = params.spin
    e, lz, kk = consts.energy, consts.ang_mom, consts.carter_k
    return (e * (r * r + a * a) - a * lz) ** 2 - params.delta(r) * (
        kk + consts.delta1 * r * r)


def polar_potential(params, consts, theta):
    """Theta(theta) = K - delta1 a^2 cos^2 - (a E sin - Phi/sin)^2."""
    a = params.spin
    e, lz, kk = consts.energy, consts.ang_mom, consts.carter_k
    sth, cth = math.sin(theta), math.cos(theta)
    return kk - consts.delta1 * a * a * cth * cth - (a * e * sth - lz / sth) ** 2


def reconstruct_momentum(params, consts, event, sign_r, sign_theta):
    """Contravariant k^mu from the constants of motion at an event.

    Turning-point radicands are clamped at zero, so the result is safe
    to evaluate exactly at a turning point.
    """
    check_exterior(params, event)
    r, th = event.r, event.theta
    a = params.spin
    e, lz = consts.energy, consts.ang_mom
    sig = params.sigma(r, th)
    dlt = params.delta(r)
    s2 = math.sin(th) ** 2

    rad_r = max(radial_potential(params, consts, r), 0.0)
    rad_th = max(polar_potential(params, consts, th), 0.0)

    kt = (e * ((r * r + a * a) ** 2 - dlt * a * a * s2)
          - params.r_s * r * a * lz) / (dlt * sig)
    kr = sign_r * math.sqrt(rad_r) / sig
    kth = sign_theta * math.sqrt(rad_th) / sig
    kphi = (params.r_s * r * a * e + (sig - params.r_s * r) * lz / s2) / (dlt * sig)
    return np.array([kt, kr, kth, kphi])


def static_tetrad(params, event):
    """Orthonormal frame of a static observer, columns e_(a)^mu.

    Legs are aligned with (t, r, theta, phi); only defined where the
    Killing vector d/dt is timelike.  For spinning bodies this is the
    locally non-rotating variant obtained by Gram-Schmidt of the
    coordinate basis starting from d/dt.
    """
    g = metric_at(params, event)
    basis = np.eye(4)
    cols = []
    for i in range(4):
        v = basis[:, i].copy()
        for u in cols:
            v -= (v @ g @ u) / (u @ g @ u) * u
        nrm = v @ g @ v
        v = v / math.sqrt(abs(nrm))
        cols.append(v)
    return np.column_stack(cols)


def unit_system(body):
    """Preset geometric parameters for named bodies.

    Returns a dict with 'mass' (GM/c^2, meters), plus convenience radii
    where applicable.  Supported names: 'earth', 'm87', 'm87_spinning'.
    Times in seconds convert to meters via multiplication by c.
    """
    if body == "earth":
        return {
            "mass": constants.M_EARTH_GEO,
            "spin": 0.0,
            "surface_radius": constants.R_EARTH_M,
            "geo_radius": constants.R_GEO_M,
        }
    if body == "m87":
        return {"mass": constants.M_M87_GEO, "spin": 0.0}
    if body == "m87_spinning":
        # spin 0.45 r_s = 0.9 M
        return {"mass": constants.M_M87_GEO, "spin": 0.9 * constants.M_M87_GEO}
    raise ValueError(f"unknown body {body!r}")

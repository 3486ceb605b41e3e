"""Parallel-transported observer tetrads along Kerr orbits.

The construction follows Marck: in the Carter orthonormal frame the
Killing-Yano tensor supplies one exactly parallel-transported unit
vector (leg 2) orthogonal to any geodesic velocity u; two further
legs orthogonal to u and leg 2 are parallel-transported up to a
rotation by an angle Psi in their plane, with dPsi/dxi given in
closed form by the constants of motion.

Tetrads are stored as 4x4 matrices with columns e_(a)^mu, a = 0..3,
column 0 the observer velocity.  TetradField packages the observer
family (static, circular equatorial orbit, polar circular orbit), the
transport-angle field, and the quantization-axis policy into a single
smooth map event -> tetrad suitable for finite differencing.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.integrate import quad

from .errors import DegenerateAxis, NoPhotonOrbit
from .littlegroup import rotation_to
from .spacetime import (
    ETA,
    ConservedQuantities,
    Event,
    check_exterior,
    metric_at,
    polar_potential,
    radial_potential,
)

# Levi-Civita symbol, eps[0,1,2,3] = +1
_EPS = np.zeros((4, 4, 4, 4))
for _p in ((0, 1, 2, 3), (0, 2, 3, 1), (0, 3, 1, 2), (1, 0, 3, 2),
           (1, 2, 0, 3), (1, 3, 2, 0), (2, 0, 1, 3), (2, 1, 3, 0),
           (2, 3, 0, 1), (3, 0, 2, 1), (3, 1, 0, 2), (3, 2, 1, 0)):
    _EPS[_p] = 1.0
for _i in range(4):
    for _j in range(4):
        for _k in range(4):
            for _l in range(4):
                if _EPS[_i, _j, _k, _l] == 0.0 and len({_i, _j, _k, _l}) == 4:
                    _EPS[_i, _j, _k, _l] = -1.0


def carter_frame(params, event):
    """Canonical orthonormal frame of Kerr, columns E_(a)^mu.

    E_(0) is the zero-angular-momentum timelike leg built from d/dt
    and d/dphi; E_(1), E_(2) point along r and theta; E_(3) is the
    remaining azimuthal leg.  All four are regular in the exterior.
    """
    check_exterior(params, event)
    r, th = event.r, event.theta
    a = params.spin
    sig = params.sigma(r, th)
    dlt = params.delta(r)
    sth = math.sin(th)
    sqds = math.sqrt(dlt * sig)
    C = np.zeros((4, 4))
    C[0, 0] = (r * r + a * a) / sqds
    C[3, 0] = a / sqds
    C[1, 1] = math.sqrt(dlt / sig)
    C[2, 2] = 1.0 / math.sqrt(sig)
    C[0, 3] = a * sth / math.sqrt(sig)
    C[3, 3] = 1.0 / (math.sqrt(sig) * sth)
    return C


def velocity_carter(params, consts, event, sign_r=0, sign_theta=0):
    """Observer velocity components in the Carter frame.

    Built directly from the constants of motion; the radial and polar
    potentials are clamped at zero so turning points are safe.
    """
    r, th = event.r, event.theta
    a = params.spin
    e, lz = consts.energy, consts.ang_mom
    sig = params.sigma(r, th)
    dlt = params.delta(r)
    sth = math.sin(th)

    u0 = (e * (r * r + a * a) - a * lz) / math.sqrt(sig * dlt)
    u1 = sign_r * math.sqrt(max(radial_potential(params, consts, r), 0.0)
                            / (sig * dlt))
    u2 = sign_theta * math.sqrt(max(polar_potential(params, consts, th), 0.0)
                                / sig)
    u3 = (lz / sth - a * e * sth) / math.sqrt(sig)
    return np.array([u0, u1, u2, u3])


def marck_legs_carter(params, consts, event, sign_r=0, sign_theta=0, psi=0.0):
    """Marck tetrad in Carter-frame components, columns (u, e1, e2, e3).

    Leg 2 comes from the Killing-Yano tensor contracted with u and is
    parallel-transported exactly; legs 1 and 3 are the canonical pair
    rotated by the transport angle psi in their plane.
    """
    r, th = event.r, event.theta
    a = params.spin
    kk = consts.carter_k
    acth = a * math.cos(th)
    u = velocity_carter(params, consts, event, sign_r, sign_theta)
    sqk = math.sqrt(kk)

    lam2 = np.array([acth * u[1], acth * u[0], r * u[3], -r * u[2]]) / sqk

    A = math.sqrt((kk - acth * acth) / (kk * (kk + r * r)))
    B = math.sqrt((kk + r * r) / (kk * (kk - acth * acth)))
    t1 = np.array([r * A * u[1], r * A * u[0], -acth * B * u[3],
                   acth * B * u[2]])

    # remaining leg: dual-orthogonal complement of (u, t1, lam2)
    w = np.einsum("abcd,a,b,c->d", _EPS, u, t1, lam2) * np.diag(ETA)
    # orientation: proper right-handed frame, det(+1) with columns
    # (u, t1, lam2, w)
    if np.linalg.det(np.column_stack([u, t1, lam2, w])) < 0.0:
        w = -w

    c, s = math.cos(psi), math.sin(psi)
    e1 = c * t1 - s * w
    e3 = s * t1 + c * w
    return np.column_stack([u, e1, lam2, e3])


def marck_angle_rate(params, consts, event):
    """dPsi/dxi of the transport angle (affine-parameter rate)."""
    r, th = event.r, event.theta
    a = params.spin
    e, lz, kk = consts.energy, consts.ang_mom, consts.carter_k
    sig = params.sigma(r, th)
    s2 = math.sin(th) ** 2
    acth2 = (a * math.cos(th)) ** 2
    return math.sqrt(kk) / sig * (
        (e * (r * r + a * a) - a * lz) / (kk + r * r)
        + a * (lz - a * e * s2) / (kk - acth2))


def carter_to_bl(params, event, legs):
    """Convert Carter-frame leg components to coordinate components."""
    return carter_frame(params, event) @ legs


def gram_schmidt(g, tet):
    """Metric Gram-Schmidt of tetrad columns, preserving order and signs."""
    out = np.array(tet, dtype=float, copy=True)
    sgn = (-1.0, 1.0, 1.0, 1.0)
    for i in range(4):
        v = out[:, i]
        for j in range(i):
            u = out[:, j]
            v = v - sgn[j] * (v @ g @ u) * u
        v = v / math.sqrt(abs(v @ g @ v))
        out[:, i] = v
    return out


def orthonormality_residual(g, tet):
    return float(np.max(np.abs(tet.T @ g @ tet - ETA)))


def xi_alignment(g, tet, normal):
    """Angle chi rotating legs (2, 3) so the quantization axis (leg 3)
    aligns with the given spatial normal vector (coordinate components).

    Returns (chi, rotated tetrad).  Raises DegenerateAxis if the
    normal has no projection on the (e2, e3) plane.
    """
    p2 = float(tet[:, 2] @ g @ normal)
    p3 = float(tet[:, 3] @ g @ normal)
    if math.hypot(p2, p3) < 1e-13 * math.sqrt(abs(normal @ g @ normal)):
        raise DegenerateAxis("orbit normal orthogonal to the (e2, e3) plane")
    chi = math.atan2(p2, p3)
    c, s = math.cos(chi), math.sin(chi)
    out = np.array(tet, copy=True)
    out[:, 2] = c * tet[:, 2] - s * tet[:, 3]
    out[:, 3] = s * tet[:, 2] + c * tet[:, 3]
    return chi, out


def circular_equatorial_constants(params, r, prograde=True):
    """(E, Phi, K) of a circular equatorial timelike orbit at radius r."""
    m, a = params.mass, params.spin
    v = math.sqrt(m / r)
    at = (a / m) * v ** 3 if m > 0 else 0.0
    sgn = 1.0 if prograde else -1.0
    den = 1.0 - 3.0 * v * v + sgn * 2.0 * at
    if den <= 0.0:
        raise NoPhotonOrbit(f"no circular orbit at r = {r}")
    root = math.sqrt(den)
    e = (1.0 - 2.0 * v * v + sgn * at) / root
    lz = sgn * r * v * (1.0 + a * a / (r * r) - sgn * 2.0 * at) / root
    kk = (a * e - lz) ** 2
    return ConservedQuantities(e, lz, kk, 1.0)


def polar_orbit_constants(params, r):
    """(E, Phi=0, K) of a spherical polar timelike orbit at radius r.

    Solves R(r) = R'(r) = 0 with zero axial angular momentum; linear
    in E^2 and K.
    """
    a = params.spin
    dlt = params.delta(r)
    ddlt = 2.0 * r - params.r_s
    w = r * r + a * a
    den = 4.0 * r * w * dlt - ddlt * w * w
    if den <= 0.0 or dlt <= 0.0:
        raise NoPhotonOrbit(f"no spherical polar orbit at r = {r}")
    e2 = 2.0 * r * dlt * dlt / den
    kk = e2 * w * w / dlt - r * r
    if kk <= 0.0:
        raise NoPhotonOrbit(f"no spherical polar orbit at r = {r}")
    return ConservedQuantities(math.sqrt(e2), 0.0, kk, 1.0)


@dataclass
class TetradField:
    """Smooth observer-tetrad field over the exterior region.

    family: 'static', 'circular_equatorial' or 'polar_orbit'.  Orbit
    families carry the conserved quantities of the orbit at
    orbit_radius and extend off the orbit sphere by evaluating the
    frame construction with those constants held fixed while (r,
    theta) vary; a Gram-Schmidt pass restores exact orthonormality
    where the frozen constants no longer normalize the velocity.  If
    orbit_radius is None the constants are recomputed at the local
    radius instead (a comoving-congruence variant).

    quantization: 'raw' keeps the construction legs; 'orbit_orthogonal'
    rotates legs (2, 3) so leg 3 is the orbit normal (the polarizer
    convention); 'along_momentum' further rotates the triad
    so the photon momentum direction lands on leg 3 (trivial gauge).
    The momentum field for 'along_momentum' comes from attach_photon.

    psi0/anchor_phi/anchor_theta fix the transport-angle gauge: the
    angle vanishes at the anchor coordinate and grows along the orbit.
    transported=False freezes the angle at psi0, leaving the legs
    anchored to the orbit frame (used for closed-form comparisons).
    """

    params: object
    family: str = "static"
    quantization: str = "orbit_orthogonal"
    orbit_radius: float = None
    transported: bool = True
    prograde: bool = True
    psi0: float = 0.0
    anchor_phi: float = 0.0
    anchor_theta: float = math.pi / 2.0
    photon: object = None  # (consts, sign_r, sign_theta) for along_momentum

    def __post_init__(self):
        if self.family not in ("static", "inertial",
                               "circular_equatorial", "polar_orbit"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "inertial" and (self.params.mass != 0.0
                                          or self.params.spin != 0.0):
            raise ValueError("inertial family requires flat spacetime")
        if self.quantization not in ("raw", "orbit_orthogonal",
                                     "along_momentum"):
            raise ValueError(f"unknown policy {self.quantization!r}")

    def attach_photon(self, consts, sign_r, sign_theta):
        self.photon = (consts, sign_r, sign_theta)

    def orbit_constants(self, r):
        rc = r if self.orbit_radius is None else self.orbit_radius
        if self.family == "circular_equatorial":
            return circular_equatorial_constants(self.params, rc,
                                                 self.prograde)
        if self.family == "polar_orbit":
            return polar_orbit_constants(self.params, rc)
        raise ValueError("static family has no orbit constants")

    def transport_angle(self, r, theta, phi):
        """Transport angle Psi of the family member through the point."""
        if not self.transported:
            return self.psi0  # legs stay anchored to the orbit frame
        rc = r if self.orbit_radius is None else self.orbit_radius
        c = self.orbit_constants(rc)
        if self.family == "circular_equatorial":
            # worldline phi(tau): rate ratio is constant on the orbit
            ev = Event(0.0, rc, math.pi / 2.0, phi)
            u = _bl_velocity(self.params, c, ev, 0, 0)
            dpsi_dphi = marck_angle_rate(self.params, c, ev) / u[3]
            return self.psi0 + dpsi_dphi * (phi - self.anchor_phi)
        # polar orbit: quadrature in theta from the anchor
        def rate(th):
            ev = Event(0.0, rc, th, phi)
            u = _bl_velocity(self.params, c, ev, 0, 1)
            return marck_angle_rate(self.params, c, ev) / u[2]
        if self.params.spin == 0.0:
            return self.psi0 + rate(math.pi / 2.0) * (theta - self.anchor_theta)
        val, _ = quad(rate, self.anchor_theta, theta, epsabs=1e-14,
                      epsrel=1e-13, limit=200)
        return self.psi0 + val

    def normal_direction(self, event):
        """Coordinate components of the orbit normal (unnormalized)."""
        n = np.zeros(4)
        if self.family == "inertial":
            # global z axis expressed in the spherical coordinate basis
            n[1] = math.cos(event.theta)
            n[2] = -math.sin(event.theta) / event.r
            return n
        if self.family == "polar_orbit":
            # +phi normal for theta-increasing orbits, -phi for the
            # opposite orientation
            n[3] = 1.0 if self.prograde else -1.0
        else:
            n[2] = -1.0  # -theta direction: north for prograde orbits
        if not self.prograde and self.family == "circular_equatorial":
            n[2] = 1.0
        return n

    def evaluate(self, event):
        g = metric_at(self.params, event)
        if self.family == "static":
            from .spacetime import static_tetrad
            tet = static_tetrad(self.params, event)
        elif self.family == "inertial":
            tet = _cartesian_tetrad(event)
        else:
            c = self.orbit_constants(event.r)
            psi = self.transport_angle(event.r, event.theta, event.phi)
            sth = 1 if self.family == "polar_orbit" else 0
            legs = marck_legs_carter(self.params, c, event, 0, sth, psi)
            tet = carter_to_bl(self.params, event, legs)
        tet = gram_schmidt(g, tet)
        if self.quantization in ("orbit_orthogonal", "along_momentum"):
            _, tet = xi_alignment(g, tet, self.normal_direction(event))
        if self.quantization == "along_momentum":
            tet = self._align_momentum(g, event, tet)
        return tet

    def _align_momentum(self, g, event, tet):
        if self.photon is None:
            raise ValueError("along_momentum policy requires attach_photon")
        from .spacetime import reconstruct_momentum
        consts, sr, sth = self.photon
        k = reconstruct_momentum(self.params, consts, event, sr, sth)
        khat = ETA @ tet.T @ g @ k   # upper-index local components
        n = khat[1:] / np.linalg.norm(khat[1:])
        R = rotation_to(n)
        return tet @ R


def _cartesian_tetrad(event):
    """Globally parallel (x, y, z)-aligned frame in flat spacetime,
    written in the spherical coordinate basis.  Its covariant
    derivative vanishes identically, so the accumulated rotation along
    any path is zero by construction.
    """
    r, th, ph = event.r, event.theta, event.phi
    st, ct = math.sin(th), math.cos(th)
    sp, cp = math.sin(ph), math.cos(ph)
    tet = np.zeros((4, 4))
    tet[0, 0] = 1.0
    tet[:, 1] = (0.0, st * cp, ct * cp / r, -sp / (r * st))
    tet[:, 2] = (0.0, st * sp, ct * sp / r, cp / (r * st))
    tet[:, 3] = (0.0, ct, -st / r, 0.0)
    return tet


def _bl_velocity(params, consts, event, sign_r, sign_theta):
    return carter_frame(params, event) @ velocity_carter(
        params, consts, event, sign_r, sign_theta)


def directional_derivative(field, event, k, step_scale=1e-3):
    """Covariant derivative k^mu nabla_mu e_(a)^nu of the tetrad field,
    by 4th-order central differences in the coordinates (the field is
    stationary, so the t derivative is dropped).
    """
    from .spacetime import christoffel_at

    tet = field.evaluate(event)
    gam = christoffel_at(field.params, event)
    dtet = np.einsum("mnr,n,ra->ma", gam, k, tet)
    x0 = event.coords()
    scales = (1.0, max(abs(event.r), 1.0), 1.0, 1.0)
    for mu in (1, 2, 3):
        if k[mu] == 0.0:
            continue
        h = step_scale * scales[mu]
        vals = []
        for m in (-2, -1, 1, 2):
            x = x0.copy()
            x[mu] += m * h
            vals.append(field.evaluate(Event(*x)))
        dmu = (vals[0] - 8.0 * vals[1] + 8.0 * vals[2] - vals[3]) / (12.0 * h)
        dtet = dtet + k[mu] * dmu
    return dtet


def transport_residual(field, r, n_samples=8, step_scale=1e-3):
    """Scaled parallel-transport residual of the field along its orbit.

    Evaluates D e_(a)/dtau = u^mu (d_mu e_(a) + Gamma u e_(a)) at
    sampled orbit phases via coordinate finite differences, scaled by
    the orbital angular rate so the result is dimensionless.
    """
    params = field.params
    c = field.orbit_constants(r)
    polar = field.family == "polar_orbit"
    worst = 0.0
    for s0 in np.linspace(-0.5, 0.5, n_samples):
        if polar:
            ev = Event(0.0, r, math.pi / 2.0 + s0, 0.3)
        else:
            ev = Event(0.0, r, math.pi / 2.0, s0)
        u = _bl_velocity(params, c, ev, 0, 1 if polar else 0)
        rate = abs(u[2] if polar else u[3])
        resid = directional_derivative(field, ev, u, step_scale)
        worst = max(worst, float(np.max(np.abs(resid))) / rate)
    return worst

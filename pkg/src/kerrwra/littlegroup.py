"""Little-group decomposition for massless momenta in local frames.

Works entirely with Minkowski 4-vectors (components in an orthonormal
frame, signature -+++).  A null momentum k is factored through the
standard vector k_std = E (1, 0, 0, 1); for a Lorentz map Lambda the
little-group element

    W(Lambda, k) = L(Lambda k)^{-1} Lambda L(k)

leaves k_std invariant and decomposes uniquely as S(alpha, beta)
R_z(psi).  The angle psi is the phase picked up by helicity states;
alpha, beta parameterize the null translations, which act trivially
on physical polarizations (gauge).
"""

import math

import numpy as np

from .errors import AntipodalSingularity, NotNull
from .spacetime import ETA

_NULL_TOL = 1e-9


def check_null(k, tol=_NULL_TOL):
    k = np.asarray(k, dtype=float)
    if k[0] <= 0.0:
        raise NotNull("null momentum must have positive frequency")
    resid = abs(float(k @ ETA @ k)) / k[0] ** 2
    if resid > tol:
        raise NotNull(f"norm residual {resid:.3e} exceeds {tol}")
    return k


def direction(k):
    """Unit spatial direction of a 4-vector."""
    n = np.asarray(k, dtype=float)[1:]
    return n / np.linalg.norm(n)


def rotation_z(angle):
    c, s = math.cos(angle), math.sin(angle)
    R = np.eye(4)
    R[1, 1] = R[2, 2] = c
    R[1, 2] = -s
    R[2, 1] = s
    return R


def boost_z(rapidity):
    c, s = math.cosh(rapidity), math.sinh(rapidity)
    B = np.eye(4)
    B[0, 0] = B[3, 3] = c
    B[0, 3] = B[3, 0] = s
    return B


def rotation_to(n, antipode_tol=1e-12):
    """Rotation taking the z axis to the unit 3-vector n.

    Rodrigues rotation about z x n; the identity when n = z.  Raises
    AntipodalSingularity when n is (numerically) antiparallel to z,
    where no continuous choice exists.
    """
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n)
    nz = n[2]
    if nz < -1.0 + antipode_tol:
        raise AntipodalSingularity("direction antiparallel to the z axis")
    axis = np.array([-n[1], n[0], 0.0])
    s = np.linalg.norm(axis)
    R3 = np.eye(3)
    if s > 0.0:
        ax = axis / s
        Kx = np.array([[0.0, -ax[2], ax[1]],
                       [ax[2], 0.0, -ax[0]],
                       [-ax[1], ax[0], 0.0]])
        R3 = np.eye(3) + s * Kx + (1.0 - nz) * (Kx @ Kx)
    R = np.eye(4)
    R[1:, 1:] = R3
    return R


def standard_lorentz(k):
    """L(k) with L(k) k_std = k, as R(n(k)) B_z(log(E))."""
    k = check_null(k)
    return rotation_to(direction(k)) @ boost_z(math.log(k[0]))


def little_group_element(lam, k):
    """W = L(Lambda k)^{-1} Lambda L(k); leaves (1,0,0,1) invariant."""
    k = check_null(k)
    kp = lam @ k
    Lk = standard_lorentz(k)
    Lkp = standard_lorentz(kp)
    return np.linalg.inv(Lkp) @ lam @ Lk


def decompose(w, tol=1e-6):
    """Split a little-group element into (alpha, beta, psi).

    W = S(alpha, beta) R_z(psi) where R_z rotates the 1-2 plane and S
    is the null-translation part.  Raises ValueError if w does not
    stabilize the standard null vector to tolerance.
    """
    w = np.asarray(w, dtype=float)
    kstd = np.array([1.0, 0.0, 0.0, 1.0])
    if np.max(np.abs(w @ kstd - kstd)) > tol:
        raise ValueError("matrix does not stabilize the standard null vector")
    psi = math.atan2(w[2, 1], w[1, 1])
    alpha = w[1, 0]
    beta = w[2, 0]
    return alpha, beta, psi


def null_translation(alpha, beta):
    """The S(alpha, beta) factor of the little group."""
    zeta = 0.5 * (alpha * alpha + beta * beta)
    S = np.array([
        [1.0 + zeta, alpha, beta, -zeta],
        [alpha, 1.0, 0.0, -alpha],
        [beta, 0.0, 1.0, -beta],
        [zeta, alpha, beta, 1.0 - zeta],
    ])
    return S


def wigner_angle(lam, k):
    """Helicity rotation angle psi of Lambda acting on null momentum k."""
    return decompose(little_group_element(lam, k))[2]


def closed_form_yaw_wra(delta_phi, n_z):
    """Closed-form Wigner angle for a small frame yaw about the y axis.

    For a photon with unit direction (0, n_t, n_z) in the y-z plane,
    n_t = sqrt(1 - n_z^2) >= 0, and a frame rotation R_y(delta_phi),

        psi = Arg[ 1 - dphi n_t / (n_t dphi / 2 + i (1 + n_z)) ]
            = 2 atan[ (dphi / 2) n_t / (1 + n_z) ],

    which agrees with the little-group extraction to first order in
    delta_phi.  The transverse component n_t multiplies dphi in the
    numerator; only the 1 + n_z factor carries the quantization-axis
    sign asymmetry (|psi| larger for n_z < 0 than for n_z > 0).
    """
    if abs(n_z) > 1.0:
        raise ValueError("n_z must lie in [-1, 1]")
    if delta_phi == 0.0:
        return 0.0
    if n_z < -1.0 + 1e-12:
        raise AntipodalSingularity("n_z = -1 with nonzero yaw")
    n_t = math.sqrt(1.0 - n_z * n_z)
    den = complex(0.5 * n_t * delta_phi, 1.0 + n_z)
    return float(np.angle(1.0 - delta_phi * n_t / den))


def polarization_vector(k, helicity):
    """Helicity polarization 4-vector for null k via the standard boost.

    eps(k, s) = L(k) eps_std(s) with eps_std = (0, 1, s i, 0)/sqrt(2).
    """
    if helicity not in (+1, -1):
        raise ValueError("helicity must be +1 or -1")
    eps_std = np.array([0.0, 1.0, 1.0j * helicity, 0.0]) / math.sqrt(2.0)
    return standard_lorentz(k) @ eps_std


def transform_polarization(lam, k, helicity):
    """Transport of a helicity polarization vector under Lambda.

    Returns (eps_out, psi): the transformed vector with its gauge
    (k'-proportional) part subtracted, and the helicity phase angle.
    eps_out equals exp(-i s psi) eps(Lambda k, s): the wave-function
    phase is opposite to the state phase exp(+i s psi).
    """
    k = check_null(k)
    kp = lam @ k
    eps = lam @ polarization_vector(k, helicity)
    # Lambda L(k) eps_std = L(k') S R_z(psi) eps_std
    #   = e^{-i s psi} [eps(k', s) + (alpha + i s beta)/sqrt(2) L(k') k_std]
    # and L(k') k_std = k' exactly, so the gauge piece is along k'.
    a, b, psi = decompose(little_group_element(lam, k))
    phase = np.exp(-1.0j * helicity * psi)
    coef = phase * (a + 1.0j * helicity * b) / math.sqrt(2.0)
    eps_out = eps - coef * kp
    return eps_out, psi


def classical_field_phase(lam, k, helicity):
    """Helicity phase from the transformed classical field strength.

    Independent route: build E^i = (Lambda eps)^i (Lambda k)^0
    - (Lambda eps)^0 (Lambda k)^i, project on the helicity basis
    transverse to Lambda k, and read the phase.  Agrees with the
    little-group angle for physical (transverse) input.
    """
    k = check_null(k)
    kp = lam @ k
    eps = lam @ polarization_vector(k, helicity)
    efield = eps[1:] * kp[0] - eps[0] * kp[1:]
    # helicity basis transverse to kp
    R = rotation_to(direction(kp))[1:, 1:]
    e1, e2 = R[:, 0], R[:, 1]
    basis = (e1 + 1.0j * helicity * e2) / math.sqrt(2.0)
    amp = np.conjugate(basis) @ efield
    # the field amplitude carries the wave-function phase -s * psi,
    # opposite to the state phase +s * psi
    return float(np.angle(amp))

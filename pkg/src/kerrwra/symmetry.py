"""Non-reciprocity of the accumulated rotation angle.

Local time reversal flips the sign of the affine parameter and of the
spatial momentum; in the local frame this flips the rotation part of
the generator while the boost part survives.  Space inversion does the
opposite.  Because the helicity-phase rate weighs the generator with
momentum-direction factors 1/(1 +- n3), the forward and transformed
angles do not cancel: the difference is a gauge-stable observable.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import AntipodalSingularity
from .wigner import integrate_wra, iwra_rate

TIME_REVERSAL = "time_reversal"
SPACE_INVERSION = "space_inversion"
AZIMUTH_FLIP = "azimuth_flip"


@dataclass(frozen=True)
class AsymmetryReport:
    """Forward vs transformed angle accumulation along one path.

    delta_psi is the direct difference psi_forward - psi_transformed.
    delta_psi_integrand is the same quantity from the single closed
    integrand; the two must agree to quadrature tolerance.
    integrand_breakdown holds per-node (rotation bracket, boost
    bracket) samples of the closed integrand.
    """

    psi_forward: float
    psi_transformed: float
    delta_psi: float
    delta_psi_integrand: float
    xi_nodes: np.ndarray
    integrand_breakdown: np.ndarray  # shape (n, 2)


def transform_lambda(lam, kind):
    """Apply a local reversal to the generator matrix.

    time_reversal flips the spatial-spatial (rotation) block and keeps
    the time-spatial (boost) entries; space_inversion does the
    opposite; 'pt' composes both (an overall sign).  Antisymmetry of
    the input is preserved by construction.
    """
    out = np.array(lam, dtype=float, copy=True)
    if kind == TIME_REVERSAL:
        out[1:, 1:] *= -1.0
    elif kind == SPACE_INVERSION:
        out[0, 1:] *= -1.0
        out[1:, 0] *= -1.0
    elif kind == "pt":
        out *= -1.0
    else:
        raise ValueError(f"unknown reversal kind {kind!r}")
    return out


def reversed_iwra_rate(lam, n):
    """Rate of the time-reversed photon: generator with rotations
    flipped, momentum direction negated, hence 1/(1 - n3) weights.
    """
    n1, n2, n3 = n
    geo = -lam[1][2]
    if abs(n1) < 1e-13 and abs(n2) < 1e-13:
        return geo  # transverse weights vanish identically
    if 1.0 - n3 < 1e-12:
        raise AntipodalSingularity("reversed momentum at the gauge antipode")
    res = (-n1 / (1.0 - n3)) * (-lam[0][2] - lam[2][3]) \
        + (-n2 / (1.0 - n3)) * (lam[0][1] - lam[3][1])
    return geo + res


def asymmetry_integrand(lam, n):
    """Closed integrand of the forward-minus-reversed angle difference.

    Returns the (rotation, boost) bracket pair; their sum integrates
    to delta_psi.  Derived by adding the forward and reversed rates
    (the reversed path runs the affine parameter backwards, so the
    reversed angle carries an overall minus sign).
    """
    n1, n2, n3 = n
    if abs(n1) < 1e-13 and abs(n2) < 1e-13:
        return 0.0, 0.0  # transverse weights vanish identically
    den = 1.0 - n3 * n3
    if den < 1e-12:
        raise AntipodalSingularity("momentum parallel to the gauge axis")
    rot = (2.0 * n1 * lam[2][3] + 2.0 * n2 * lam[3][1]) / den
    boost = (2.0 * n1 * n3 * lam[0][2] - 2.0 * n2 * n3 * lam[0][1]) / den
    return rot, boost


def delta_psi_time_reversal(traj, field, **quad_kw):
    """Angle difference between a path and its local time reverse.

    Computes the difference twice: directly (forward quadrature minus
    the reversed-rate quadrature) and through the closed integrand.
    """
    fwd = integrate_wra(traj, field, **quad_kw)
    rev = integrate_wra(traj, field,
                        rate_fn=reversed_iwra_rate, **quad_kw)
    psi_rev = -rev.psi_total  # reversed path runs xi backwards
    closed = integrate_wra(traj, field,
                           rate_fn=asymmetry_integrand, **quad_kw)
    breakdown = np.column_stack([closed.rate_geodetic,
                                 closed.rate_residual])
    return AsymmetryReport(fwd.psi_total, psi_rev,
                           fwd.psi_total - psi_rev,
                           closed.psi_total,
                           closed.xi_nodes, breakdown)


def delta_psi_azimuth_flip(traj_pair, field, **quad_kw):
    """Angle difference between mirror launches (azimuthal momentum
    component negated).  The closed-integrand route is evaluated on
    the first path; for a spherically symmetric mass the mirror path
    accumulates exactly the time-reversed angle, so the direct and
    integrand routes agree.
    """
    traj_pos, traj_neg = traj_pair
    pos = integrate_wra(traj_pos, field, **quad_kw)
    neg = integrate_wra(traj_neg, field, **quad_kw)
    closed = integrate_wra(traj_pos, field,
                           rate_fn=asymmetry_integrand, **quad_kw)
    breakdown = np.column_stack([closed.rate_geodetic,
                                 closed.rate_residual])
    return AsymmetryReport(pos.psi_total, neg.psi_total,
                           pos.psi_total - neg.psi_total,
                           closed.psi_total,
                           closed.xi_nodes, breakdown)


def schwarzschild_lambda_closed_form(params, event, k_phi):
    """Closed form of the azimuth-driven generator components for a
    non-spinning mass: (lam_31, lam_32) = -k^phi sqrt(1 - r_s/r) *
    (cos, sin)(sqrt(1 - 3 r_s/r) (theta - pi/2)).
    """
    if params.spin != 0.0:
        raise ValueError("closed form requires zero spin")
    r = event.r
    rs = params.r_s
    if r <= 3.0 * rs:
        raise ValueError("closed form undefined at or below r = 3 r_s")
    amp = -k_phi * math.sqrt(1.0 - rs / r)
    arg = math.sqrt(1.0 - 3.0 * rs / r) * (event.theta - math.pi / 2.0)
    return amp * math.cos(arg), amp * math.sin(arg)


@dataclass(frozen=True)
class PtReport:
    sigma: int
    sigma_psi_forward: float
    sigma_psi_t: float
    sigma_psi_pt: float
    t_violation: float
    pt_violation: float

    @property
    def pt_symmetric(self):
        return abs(self.pt_violation) < 1e-9


def pt_check(traj, field, sigma=1, **quad_kw):
    """Verify that sigma * psi survives a combined space inversion and
    time reversal while time reversal alone shifts it.

    Bookkeeping: time reversal flips the rotation block of the
    generator, the momentum direction, and the affine measure, keeping
    the helicity; space inversion composed on top flips the boost
    block, restores the momentum direction and the measure, and flips
    the helicity.  The composite photon accumulates the angle of the
    fully negated generator along the forward path, so the helicity
    flip cancels the angle flip and sigma * psi is invariant, while
    the momentum-direction weights spoil the cancellation for time
    reversal alone.
    """
    fwd = integrate_wra(traj, field, **quad_kw)
    psi = fwd.psi_total

    def pt_rate(lam, n):
        return iwra_rate(transform_lambda(lam, "pt"), n)

    t_tr = integrate_wra(traj, field,
                         rate_fn=reversed_iwra_rate, **quad_kw)
    pt_tr = integrate_wra(traj, field, rate_fn=pt_rate, **quad_kw)
    psi_t = -t_tr.psi_total   # affine measure runs backwards
    psi_pt = pt_tr.psi_total
    s_fwd = sigma * psi
    s_t = sigma * psi_t
    s_pt = (-sigma) * psi_pt
    return PtReport(sigma, s_fwd, s_t, s_pt,
                    s_t - s_fwd, s_pt - s_fwd)

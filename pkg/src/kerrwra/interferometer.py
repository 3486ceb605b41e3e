"""Interferometer observables built on the accumulated rotation angle.

Two photons with opposite impact parameters pick up different helicity
phases (the non-reciprocity), so a Hong-Ou-Mandel interferometer whose
arms are the mirror launches converts the angle difference delta_psi
into a coincidence-rate shift, and a Mach-Zehnder converts it into a
fringe shift.  The constellation solver places the relay satellites so
both arms share the launch and detection radii.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceFailure
from .wigner import integrate_wra

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class TwoPhotonAmplitudes:
    """Output coefficients of the second beam splitter."""

    amp_20: complex
    amp_02: complex
    amp_11: complex

    @property
    def probabilities(self):
        return (abs(self.amp_20) ** 2, abs(self.amp_02) ** 2,
                abs(self.amp_11) ** 2)


def hom_input_split():
    """Two-photon state after the first splitter and the pi/2 shift:
    (|2,0> - i|0,2>)/2 on the two arms, no |1,1> component.
    """
    return 0.5, -0.5j, 0.0


def hom_output(delta_psi, sigma=1):
    """Amplitudes at the recombining splitter for a helicity-sigma
    pair whose arms differ by the accumulated angle delta_psi.
    """
    ph = 1j * cmath.exp(1j * sigma * delta_psi)
    amp_2020 = (ph + 1.0) / (2.0 * _SQRT2)
    amp_11 = (-1.0 + ph) / 2.0
    return TwoPhotonAmplitudes(amp_2020, amp_2020, amp_11)


def coincidence_rate(delta_psi, sigma=1):
    """Printed closed form of the coincidence probability."""
    return 0.5 * (1.0 - math.sin(sigma * delta_psi))


def coincidence_rate_from_amplitudes(delta_psi, sigma=1):
    """Diagnostic companion: |1,1> probability from the amplitude
    evolution.  Differs from coincidence_rate by the sign of the sine
    (an internal sign tension of the source model); both are exposed
    so the discrepancy stays visible.
    """
    return abs(hom_output(delta_psi, sigma).amp_11) ** 2


def mz_intensity(delta_psi, sigma=1):
    """Mach-Zehnder two-port intensities for relative phase
    sigma*delta_psi; identical for a classical monochromatic field and
    a single-photon source.
    """
    half = 0.5 * sigma * delta_psi
    return math.cos(half) ** 2, math.sin(half) ** 2


@dataclass(frozen=True)
class ConstellationGeometry:
    """Relay placement for the two mirror arms (lengths in meters)."""

    a: float
    b: float
    c: float
    h: float
    alpha: float
    beta: float
    ab: float

    def residuals(self, ad):
        law1 = self.a ** 2 + self.b ** 2 \
            - 2.0 * self.a * self.b * math.cos(2.0 * self.beta) - self.c ** 2
        law2 = self.a ** 2 + self.c ** 2 \
            - 2.0 * self.a * self.c * math.cos(math.pi - self.alpha) \
            - self.b ** 2
        hrel = self.h * (1.0 / math.tan(self.alpha)
                         + math.tan(math.pi / 2.0 - self.alpha
                                    + 2.0 * self.beta)) - ad
        return law1, law2, hrel


def solve_constellation(a, b, alpha, ad):
    """Solve the relay geometry: beta from the coupled triangle
    relations, then the half-separation h and the first-leg length AB.
    """
    if min(a, b, ad) <= 0.0 or not 0.0 < alpha < math.pi / 2.0:
        raise ValueError("need positive lengths and 0 < alpha < pi/2")

    def law2_residual(beta):
        c = math.sqrt(a * a + b * b - 2.0 * a * b * math.cos(2.0 * beta))
        return a * a + c * c + 2.0 * a * c * math.cos(alpha) - b * b

    lo, hi = 1e-12, math.pi / 2.0 - 1e-12
    flo, fhi = law2_residual(lo), law2_residual(hi)
    if flo * fhi > 0.0:
        raise ConvergenceFailure("no relay-angle root in (0, pi/2)")
    beta = brentq(law2_residual, lo, hi, xtol=1e-12, rtol=8.9e-16)
    c = math.sqrt(a * a + b * b - 2.0 * a * b * math.cos(2.0 * beta))
    h = ad / (1.0 / math.tan(alpha)
              + math.tan(math.pi / 2.0 - alpha + 2.0 * beta))
    ab = h / math.sin(alpha)
    return ConstellationGeometry(a, b, c, h, alpha, beta, ab)


@dataclass
class InterferometerScenario:
    """Mirror-arm interferometer around one body.

    The two arms are launches at +-ratio from alice_radius out to
    david_radius; relay_radius (Bob/Charlie) comes from the
    constellation solver unless given explicitly.
    """

    params: object
    field: object
    alice_radius: float
    david_radius: float
    ratio: float
    sigma: int = 1
    source: str = "two_photon_hom"
    relay_radius: float = None

    def __post_init__(self):
        if self.source not in ("two_photon_hom", "classical",
                               "single_photon"):
            raise ValueError(f"unknown source {self.source!r}")


def _xi_at_radius(traj, r):
    """Affine parameter where a radially monotone trajectory crosses r."""
    r0 = traj.event_at(0.0).r
    r1 = traj.event_at(traj.xi_end).r
    scale = max(abs(r0), abs(r1))
    if abs(r - r0) < 1e-9 * scale:
        return 0.0
    if abs(r - r1) < 1e-9 * scale:
        return traj.xi_end
    return brentq(lambda xi: traj.event_at(xi).r - r, 0.0, traj.xi_end,
                  xtol=1e-9, rtol=8.9e-16)


def _arm_trajectories(scn):
    from .geodesic import StopCondition, integrate, launch_with_ratio
    arms = {}
    for s in (1, -1):
        c, ev, sr, sth = launch_with_ratio(
            scn.params, scn.alice_radius, s * scn.ratio, "equatorial")
        arms[s] = integrate(scn.params, c, ev, sr, sth,
                            StopCondition("radius", scn.david_radius))
    return arms


def _relay_radius(scn, traj_pos):
    if scn.relay_radius is not None:
        return scn.relay_radius
    alpha = math.atan(abs(scn.ratio))
    ev_end = traj_pos.event_at(traj_pos.xi_end)
    ev_0 = traj_pos.event_at(0.0)
    dphi = abs(ev_end.phi - ev_0.phi)
    ad = math.sqrt(scn.alice_radius ** 2 + scn.david_radius ** 2
                   - 2.0 * scn.alice_radius * scn.david_radius
                   * math.cos(dphi))
    geom = solve_constellation(scn.alice_radius, scn.david_radius,
                               alpha, ad)
    # chord AB leaves Alice at angle alpha from the outward radial
    return math.sqrt(scn.alice_radius ** 2 + geom.ab ** 2
                     + 2.0 * scn.alice_radius * geom.ab * math.cos(alpha))


def scenario_delta_psi(scn, **quad_kw):
    """Arm phase difference via the radial decomposition.

    With D(r) the accumulated (positive-arm minus negative-arm) angle
    up to radius r, the Alice->relay->David loop difference is
    2 D(r_relay) - D(r_david): the first leg difference enters twice
    because the arms swap impact-parameter signs at the relay.
    """
    if scn.ratio == 0.0:
        return 0.0
    arms = _arm_trajectories(scn)
    traces = {s: integrate_wra(arms[s], scn.field, **quad_kw)
              for s in (1, -1)}
    r_relay = _relay_radius(scn, arms[1])

    def diff_at(r):
        return (traces[1].cumulative(_xi_at_radius(arms[1], r))
                - traces[-1].cumulative(_xi_at_radius(arms[-1], r)))

    return 2.0 * diff_at(r_relay) - diff_at(scn.david_radius)


def scenario_delta_psi_four_leg(scn, **quad_kw):
    """Cross-check route: the four leg integrals summed directly,
    Alice->relay on each arm plus relay->David with the arms swapped.
    """
    if scn.ratio == 0.0:
        return 0.0
    arms = _arm_trajectories(scn)
    traces = {s: integrate_wra(arms[s], scn.field, **quad_kw)
              for s in (1, -1)}
    r_relay = _relay_radius(scn, arms[1])
    legs = {}
    for s in (1, -1):
        xi_b = _xi_at_radius(arms[s], r_relay)
        first = traces[s].cumulative(xi_b)
        total = traces[s].cumulative(arms[s].xi_end)
        legs[s] = (first, total - first)
    return (legs[1][0] - legs[-1][0]) + (legs[-1][1] - legs[1][1])


def scenario_observables(scn, **quad_kw):
    """Delta psi plus the source-appropriate detector outputs."""
    dps = scenario_delta_psi(scn, **quad_kw)
    out = {
        "delta_psi": dps,
        "coincidence_rate": coincidence_rate(dps, scn.sigma),
        "coincidence_rate_amp": coincidence_rate_from_amplitudes(
            dps, scn.sigma),
        "mz_intensity": mz_intensity(dps, scn.sigma),
    }
    return out

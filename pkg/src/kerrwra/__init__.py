"""Photon Wigner-rotation angles along Kerr null geodesics.

Geometric units G = c = 1, lengths in meters, metric signature
(-, +, +, +).  The main entry points:

- spacetime: Kerr metric, Christoffels, conserved photon quantities
- geodesic: first-order null geodesic integrator with sign registers
- tetrad: observer tetrad fields (static, inertial, circular and
  polar orbits) with parallel-transport angle tracking
- littlegroup: flat-space little-group decomposition and helicity
  phases
- wigner: rate quadrature and composed-matrix oracle for the
  accumulated Wigner rotation angle
- symmetry: time-reversal / azimuth-flip / space-inversion
  asymmetries of the accumulated angle
- interferometer: Hong-Ou-Mandel and Mach-Zehnder observables for
  mirror-arm constellations
- scenarios, cli: preset experiments and the command-line runner
"""

__version__ = "0.1.0"

from .errors import (
    AntipodalSingularity,
    ConfigError,
    ConvergenceFailure,
    DegenerateAxis,
    HorizonViolation,
    InvalidSpin,
    KerrwraError,
    NegativeRadicand,
    NoPhotonOrbit,
    NotNull,
    NotTimelike,
    PoleSingularity,
)
from .spacetime import (
    ConservedQuantities,
    Event,
    KerrParams,
    conserved_from_momentum,
    metric_at,
    reconstruct_momentum,
    unit_system,
)
from .geodesic import StopCondition, Trajectory, integrate, launch_with_ratio
from .tetrad import TetradField
from .littlegroup import (
    closed_form_yaw_wra,
    decompose,
    little_group_element,
    wigner_angle,
)
from .wigner import (
    WraTrace,
    composed_wra,
    composed_wra_extrapolated,
    integrate_wra,
    iwra_rate,
    lambda_matrix,
)
from .symmetry import (
    AsymmetryReport,
    PtReport,
    delta_psi_azimuth_flip,
    delta_psi_time_reversal,
    pt_check,
)
from .interferometer import (
    InterferometerScenario,
    TwoPhotonAmplitudes,
    coincidence_rate,
    coincidence_rate_from_amplitudes,
    hom_output,
    mz_intensity,
    scenario_delta_psi,
    scenario_observables,
    solve_constellation,
)
from .scenarios import get_interferometer_preset, get_preset

"""Preset scenarios shared by the command line tool and the tests.

Each preset bundles a spacetime, an observer tetrad field, and a
photon launch recipe.  Ratios are the local transverse/radial
momentum ratio at launch; negative values mirror the transverse leg.
"""

import dataclasses
import math

from . import constants
from .geodesic import StopCondition, integrate, launch_with_ratio
from .interferometer import InterferometerScenario
from .spacetime import KerrParams, unit_system
from .tetrad import TetradField

# Polar-orbit altitude used for the Earth presets: a low circular
# orbit 300 km above the mean surface.
R_EARTH_ORBIT = 6.671e6
# Receiver radius for the Earth presets, just outside the
# geostationary belt.
R_EARTH_STOP = 4.2371e7


@dataclasses.dataclass
class WraScenario:
    """A spacetime + tetrad field + launch grid for WRA sweeps."""

    name: str
    params: KerrParams
    field: TetradField
    r_launch: float
    r_stop: float
    ratios: tuple
    plane: str = "equatorial"

    def build(self, ratio):
        """Trajectory and (photon-attached, if needed) field for one
        grid point."""
        c, ev, sr, sth = launch_with_ratio(self.params, self.r_launch,
                                           ratio, self.plane)
        traj = integrate(self.params, c, ev, sr, sth,
                         StopCondition("radius", self.r_stop))
        field = self.field
        if field.quantization == "along_momentum":
            field = dataclasses.replace(field)
            field.attach_photon(c, sr, sth)
        return traj, field


def _earth_params():
    u = unit_system("earth")
    return KerrParams(mass=u["mass"], spin=u["spin"])


def _m87_params(spinning=False):
    u = unit_system("m87_spinning" if spinning else "m87")
    return KerrParams(mass=u["mass"], spin=u["spin"])


def minkowski():
    p = KerrParams(mass=0.0, spin=0.0)
    f = TetradField(p, family="inertial", quantization="orbit_orthogonal")
    return WraScenario("minkowski", p, f, 1.0e7, 4.0e7, (0.5, -0.5))


def schwarzschild_static():
    p = _earth_params()
    f = TetradField(p, family="static", quantization="orbit_orthogonal")
    return WraScenario("schwarzschild_static", p, f,
                       constants.R_EARTH_M, R_EARTH_STOP,
                       (0.5, 1.0, -0.5, -1.0))


def earth_polar():
    p = _earth_params()
    f = TetradField(p, family="polar_orbit",
                    quantization="orbit_orthogonal",
                    orbit_radius=R_EARTH_ORBIT)
    return WraScenario("earth_polar", p, f,
                       constants.R_EARTH_M, R_EARTH_STOP,
                       (0.8, 1.0, 1.2, -0.8, -1.0, -1.2))


def earth_equatorial():
    p = _earth_params()
    f = TetradField(p, family="circular_equatorial",
                    quantization="orbit_orthogonal",
                    orbit_radius=R_EARTH_ORBIT)
    return WraScenario("earth_equatorial", p, f,
                       constants.R_EARTH_M, R_EARTH_STOP,
                       (0.3, 0.6, 1.0, -0.3, -0.6, -1.0))


def m87_equatorial(spinning=False):
    p = _m87_params(spinning)
    m = p.mass
    f = TetradField(p, family="circular_equatorial",
                    quantization="orbit_orthogonal",
                    orbit_radius=9.0 * m)
    name = "m87_spinning" if spinning else "m87_equatorial"
    return WraScenario(name, p, f, 9.0 * m, 30.0 * m,
                       (0.2, 0.4, 0.6, 0.8, 1.0, 1.2,
                        -0.2, -0.4, -0.6, -0.8, -1.0, -1.2))


def trivial_gauge():
    """Earth polar geometry with the quantization axis slaved to the
    photon momentum; every accumulated angle should vanish."""
    p = _earth_params()
    f = TetradField(p, family="polar_orbit",
                    quantization="along_momentum",
                    orbit_radius=R_EARTH_ORBIT)
    return WraScenario("trivial_gauge", p, f,
                       constants.R_EARTH_M, R_EARTH_STOP,
                       (1.0, -1.0))


def earth_interferometer(alpha=0.3, sigma=1):
    p = _earth_params()
    f = TetradField(p, family="polar_orbit",
                    quantization="orbit_orthogonal",
                    orbit_radius=R_EARTH_ORBIT)
    return InterferometerScenario(p, f, R_EARTH_ORBIT, R_EARTH_STOP,
                                  math.tan(alpha), sigma=sigma)


def m87_interferometer(alpha=0.3, sigma=1, spinning=False):
    p = _m87_params(spinning)
    m = p.mass
    f = TetradField(p, family="circular_equatorial",
                    quantization="orbit_orthogonal",
                    orbit_radius=9.0 * m)
    return InterferometerScenario(p, f, 9.0 * m, 30.0 * m,
                                  math.tan(alpha), sigma=sigma)


PRESETS = {
    "minkowski": minkowski,
    "schwarzschild_static": schwarzschild_static,
    "earth_polar": earth_polar,
    "earth_equatorial": earth_equatorial,
    "m87_equatorial": m87_equatorial,
    "m87_spinning": lambda: m87_equatorial(spinning=True),
    "trivial_gauge": trivial_gauge,
}

INTERFEROMETER_PRESETS = {
    "earth_interferometer": earth_interferometer,
    "m87_interferometer": m87_interferometer,
    "m87_interferometer_spinning":
        lambda alpha=0.3, sigma=1: m87_interferometer(alpha, sigma, True),
}


def get_preset(name):
    try:
        return PRESETS[name]()
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choices: "
                         + ", ".join(sorted(PRESETS))) from None


def get_interferometer_preset(name, alpha=0.3, sigma=1):
    try:
        return INTERFEROMETER_PRESETS[name](alpha=alpha, sigma=sigma)
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choices: "
                         + ", ".join(sorted(INTERFEROMETER_PRESETS))) \
            from None

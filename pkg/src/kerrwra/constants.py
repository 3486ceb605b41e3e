"""Physical constants (SI) and geometrized-unit conversions.

All geometry code works in geometric units G = c = 1 with lengths in
meters.  A body of mass M kilograms has geometric mass GM/c^2 meters
and Schwarzschild radius 2GM/c^2 meters.
"""

# CODATA 2018
G_NEWTON = 6.67430e-11        # m^3 kg^-1 s^-2
C_LIGHT = 299792458.0         # m/s  (exact)

# IAU nominal values
GM_SUN = 1.32712440018e20     # m^3 s^-2
M_SUN_KG = GM_SUN / G_NEWTON

M_EARTH_KG = 5.9722e24
R_EARTH_M = 6.371e6           # mean radius

# Geostationary belt, measured from Earth's center.
R_GEO_M = 42.164e6


def geometric_mass(mass_kg):
    """GM/c^2 in meters for a mass in kilograms."""
    return G_NEWTON * mass_kg / C_LIGHT**2


# Geometric masses of the preset bodies, meters.
M_EARTH_GEO = geometric_mass(M_EARTH_KG)          # ~4.435e-3 m
M_M87_GEO = geometric_mass(6.5e9 * M_SUN_KG)      # ~9.6e12 m

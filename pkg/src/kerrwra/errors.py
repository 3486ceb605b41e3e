"""Exception types shared across the package."""


class KerrwraError(Exception):
    """Base class for all package-specific errors."""


class HorizonViolation(KerrwraError):
    """An event lies on or inside the outer horizon."""


class PoleSingularity(KerrwraError):
    """An event is too close to the coordinate axis (sin(theta) ~ 0)."""


class InvalidSpin(KerrwraError):
    """Spin parameter exceeds the extremal bound |a| <= M."""


class NotNull(KerrwraError):
    """A momentum vector fails the null-norm check."""


class NotTimelike(KerrwraError):
    """A velocity vector fails the timelike-norm check."""


class NegativeRadicand(KerrwraError):
    """A turning-point radicand went negative beyond tolerance."""


class AntipodalSingularity(KerrwraError):
    """Rotation onto a direction antiparallel to the reference axis."""


class DegenerateAxis(KerrwraError):
    """Quantization-axis alignment is undefined (zero projection)."""


class NoPhotonOrbit(KerrwraError):
    """No circular photon orbit / bound orbit exists for the inputs."""


class ConvergenceFailure(KerrwraError):
    """An iterative solve or adaptive integration failed to converge."""


class ConfigError(KerrwraError):
    """A scenario configuration file is missing, malformed, or
    inconsistent."""

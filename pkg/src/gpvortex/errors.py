"""Exception types shared across the package."""


class GpvortexError(Exception):
    """Base class for package errors."""


class NoHoleError(GpvortexError):
    """Raised when (epsilon, Omega0) lies below the TF hole threshold."""


class ConvergenceError(GpvortexError):
    """An iterative solver failed to reach its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class GridMismatchError(GpvortexError):
    """Fields/profiles defined on incompatible grids."""


class DegenerateProfileError(GpvortexError):
    """Profile amplitude too small to divide by."""


class DegreeUndefinedError(GpvortexError):
    """Winding number requested on a ring where the field nearly vanishes."""


class ConfigError(GpvortexError):
    """Invalid CLI/JSON configuration (exit code 2)."""

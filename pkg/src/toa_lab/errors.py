"""Exception types shared by the library and mapped to CLI exit codes."""


class ToaError(Exception):
    """Base class for all errors raised by toa_lab."""


class DomainError(ToaError, ValueError):
    """An argument lies outside the domain of the operation."""


class DegenerateNormalizationError(ToaError, ArithmeticError):
    """A distribution's normalization constant vanishes (or is negative)."""


class DimensionalInconsistencyError(DomainError):
    """The requested quantity is not dimensionless for this detector type."""


class NonConvergenceError(ToaError, ArithmeticError):
    """Adaptive quadrature hit its refinement limit.

    ``worst_panel`` holds ``(a, b, error_estimate)`` of the panel that
    contributed the largest error estimate when refinement stopped.
    """

    def __init__(self, message, worst_panel=None):
        super().__init__(message)
        self.worst_panel = worst_panel


class AliasingError(ToaError, ArithmeticError):
    """Spectral propagation wrapped amplitude around the periodic grid."""


class ConfigError(ToaError, ValueError):
    """Invalid or inconsistent experiment configuration."""

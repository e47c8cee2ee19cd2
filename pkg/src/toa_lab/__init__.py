"""Quantum time-of-arrival distributions for free Gaussian wave packets."""

__version__ = "0.1.0"

from .errors import (AliasingError, ConfigError, DegenerateNormalizationError,
                     DimensionalInconsistencyError, DomainError, NonConvergenceError, ToaError)
from .packet import GaussianTerm, Interval, PacketSpec, Point, centered_interval, gaussian, odd_pair
from .units import UnitSystem, make_unit_system, momentum_from_velocity

__all__ = [
    "AliasingError", "ConfigError", "DegenerateNormalizationError",
    "DimensionalInconsistencyError", "DomainError", "NonConvergenceError", "ToaError",
    "GaussianTerm", "Interval", "PacketSpec", "Point", "centered_interval", "gaussian",
    "odd_pair", "UnitSystem", "make_unit_system", "momentum_from_velocity",
]

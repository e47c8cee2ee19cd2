"""Physical constants and nondimensionalization.

All downstream numerics use units in which hbar = m = 1 and the initial
packet width sigma0 is the unit of length. Then

    length   = sigma0
    time     = m * sigma0**2 / hbar
    momentum = hbar / sigma0
    velocity = hbar / (m * sigma0)
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError

HBAR_SI = 1.054571817e-34  # J s, CODATA 2018 (exact in the 2019 SI)

_DIMENSIONS = ("length", "time", "momentum", "velocity", "mass")


@dataclass(frozen=True)
class UnitSystem:
    mass_si: float
    sigma0_si: float

    def __post_init__(self):
        for name in ("mass_si", "sigma0_si"):
            value = getattr(self, name)
            if not (value > 0 and value < float("inf")):
                raise DomainError(f"{name} must be positive and finite, got {value!r}")

    @property
    def hbar_si(self) -> float:
        return HBAR_SI

    @property
    def length_unit_si(self) -> float:
        return self.sigma0_si

    @property
    def time_unit_si(self) -> float:
        return self.mass_si * self.sigma0_si**2 / HBAR_SI

    @property
    def momentum_unit_si(self) -> float:
        return HBAR_SI / self.sigma0_si

    @property
    def velocity_unit_si(self) -> float:
        return HBAR_SI / (self.mass_si * self.sigma0_si)

    def unit(self, dimension: str) -> float:
        """SI size of one dimensionless unit of ``dimension``."""
        if dimension == "length":
            return self.length_unit_si
        if dimension == "time":
            return self.time_unit_si
        if dimension == "momentum":
            return self.momentum_unit_si
        if dimension == "velocity":
            return self.velocity_unit_si
        if dimension == "mass":
            return self.mass_si
        raise DomainError(f"unknown dimension {dimension!r}; expected one of {_DIMENSIONS}")

    def to_dimensionless(self, value, dimension: str):
        return value / self.unit(dimension)

    def to_si(self, value, dimension: str):
        return value * self.unit(dimension)


def make_unit_system(mass: float, sigma0: float) -> UnitSystem:
    """Build the unit system for a particle of ``mass`` (kg) and width ``sigma0`` (m)."""
    return UnitSystem(float(mass), float(sigma0))


def momentum_from_velocity(v: float, units: UnitSystem) -> float:
    """Dimensionless momentum m*v*sigma0/hbar of a particle moving at ``v`` m/s."""
    return units.mass_si * v * units.sigma0_si / HBAR_SI

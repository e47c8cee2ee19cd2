"""Flat ``key = value`` experiment configs and the bundled presets.

A config is either dimensionless (hbar = m = 1, lengths in units of the
packet width) or SI, in which case ``mass_kg`` and ``sigma0_m`` fix the unit
system and every length, time and velocity key is read in metres, seconds
and metres per second.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import packet as pk
from .errors import ConfigError, DomainError
from .units import UnitSystem, momentum_from_velocity

PRESETS = ("fig1", "fig2", "gaussian", "odd_pair")

_FLOAT_KEYS = {
    "mass_kg", "sigma0_m", "x0", "p0", "velocity", "width", "separation",
    "detector_center", "delta_l", "t_min", "t_max", "tol", "sweep_t1", "sweep_t2",
    "synthetic_slope", "synthetic_intercept",
}
_INT_KEYS = {"t_n"}
_CHOICES = {
    "units": ("dimensionless", "si"),
    "packet": ("gaussian", "odd_pair", "superposition"),
    "detector": ("point", "interval"),
}


@dataclass(frozen=True)
class ExperimentConfig:
    units: str = "dimensionless"
    mass_kg: float | None = None
    sigma0_m: float | None = None
    packet: str = "gaussian"
    x0: float = 0.0
    p0: float | None = None
    velocity: float | None = None
    width: float | None = None
    separation: float | None = None
    terms: str | None = None
    detector: str = "point"
    detector_center: float = 0.0
    delta_l: float | None = None
    T_values: tuple[float, ...] = ()
    t_min: float = 0.0
    t_max: float | None = None
    t_n: int = 201
    tol: float = 1e-12
    sweep_t1: float | None = None
    sweep_t2: float | None = None
    synthetic_slope: float | None = None
    synthetic_intercept: float = 0.0
    csv: str | None = None
    svg: str | None = None

    def __post_init__(self):
        for key, allowed in _CHOICES.items():
            if getattr(self, key) not in allowed:
                raise ConfigError(f"{key} must be one of {allowed}, got {getattr(self, key)!r}")
        if self.units == "si":
            if self.mass_kg is None or self.sigma0_m is None:
                raise ConfigError("units = si needs mass_kg and sigma0_m")
            if self.p0 is not None:
                raise ConfigError("in SI configs give the mean momentum as velocity (m/s), not p0")
        elif self.velocity is not None:
            raise ConfigError("velocity is only accepted with units = si; use p0")
        if self.detector == "interval" and self.delta_l is None:
            raise ConfigError("interval detector needs delta_l (no default is assumed)")
        T = np.asarray(self.T_values, dtype=float)
        if T.size and (np.any(~np.isfinite(T)) or np.any(T <= 0) or np.any(np.diff(T) <= 0)):
            raise ConfigError("T_values must be positive and strictly increasing")
        if not (self.tol > 0):
            raise ConfigError("tol must be positive")
        if self.t_n < 2:
            raise ConfigError("t_n must be at least 2")

    # -- resolution to dimensionless quantities ---------------------------

    @property
    def unit_system(self) -> UnitSystem | None:
        if self.units != "si":
            return None
        try:
            return UnitSystem(self.mass_kg, self.sigma0_m)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def time_unit(self) -> float:
        """Seconds per dimensionless time unit (1 for dimensionless configs)."""
        us = self.unit_system
        return us.time_unit_si if us else 1.0

    @property
    def length_unit(self) -> float:
        us = self.unit_system
        return us.length_unit_si if us else 1.0

    @property
    def time_label(self) -> str:
        return "seconds" if self.units == "si" else "dimensionless"

    def _length(self, value):
        return None if value is None else value / self.length_unit

    def _time(self, value):
        return None if value is None else value / self.time_unit

    def momentum(self) -> float:
        if self.units == "si":
            return momentum_from_velocity(self.velocity or 0.0, self.unit_system)
        return 0.0 if self.p0 is None else self.p0

    def packet_spec(self) -> pk.PacketSpec:
        width = self._length(self.width) if self.width is not None else 1.0
        try:
            if self.packet == "gaussian":
                return pk.gaussian(self._length(self.x0), self.momentum(), width)
            if self.packet == "odd_pair":
                if self.separation is None:
                    raise ConfigError("odd_pair packet needs separation")
                return pk.odd_pair(self._length(self.separation), width, self.momentum())
            return pk.PacketSpec.normalized(self._parse_terms())
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def _parse_terms(self):
        """``terms = re:im:center:width:momentum; ...`` in dimensionless units."""
        if not self.terms:
            raise ConfigError("superposition packet needs terms")
        if self.units != "dimensionless":
            raise ConfigError("superposition terms are only accepted in dimensionless configs")
        out = []
        for chunk in self.terms.split(";"):
            parts = chunk.strip().split(":")
            if len(parts) != 5:
                raise ConfigError(f"term {chunk.strip()!r} must have 5 fields re:im:center:width:momentum")
            try:
                re_w, im_w, center, width, momentum = (float(v) for v in parts)
            except ValueError as exc:
                raise ConfigError(f"bad number in term {chunk.strip()!r}") from exc
            out.append(pk.GaussianTerm(complex(re_w, im_w), center, width, momentum))
        return out

    def detector_obj(self) -> pk.Point | pk.Interval:
        center = self._length(self.detector_center)
        if self.detector == "point":
            return pk.Point(center)
        try:
            return pk.centered_interval(self._length(self.delta_l), center)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def point_detector(self) -> pk.Point:
        """Point used by K/F/SC: the detector itself or the interval midpoint."""
        return pk.Point(self._length(self.detector_center))

    def T_dimensionless(self) -> np.ndarray:
        if not self.T_values:
            raise ConfigError("T_values is empty")
        return np.asarray(self.T_values, dtype=float) / self.time_unit

    def t_grid(self) -> np.ndarray:
        if self.t_max is None:
            raise ConfigError("t_max is required for time-grid output")
        if not self.t_max > self.t_min:
            raise ConfigError("t_max must exceed t_min")
        return np.linspace(self.t_min, self.t_max, self.t_n) / self.time_unit

    def resolved_lines(self) -> list[str]:
        """Every field as ``key = value``, in declaration order, for provenance headers."""
        lines = []
        for f in dataclasses.fields(self):
            if f.name in ("csv", "svg"):
                continue
            value = getattr(self, f.name)
            if value is None:
                continue
            if isinstance(value, tuple):
                value = ", ".join(_fmt(v) for v in value)
            elif isinstance(value, float):
                value = _fmt(value)
            lines.append(f"{f.name} = {value}")
        return lines


def _fmt(v: float) -> str:
    return format(float(v), ".12g")


def parse_config_text(text: str, source: str = "<string>") -> ExperimentConfig:
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        values[key] = _convert(key, value, f"{source}:{lineno}")
    return build_config(values)


def _convert(key, value, where):
    try:
        if key in _FLOAT_KEYS:
            out = float(value)
            if not math.isfinite(out):
                raise ValueError
            return out
        if key in _INT_KEYS:
            return int(value)
        if key == "T_values":
            return parse_float_list(value)
    except ValueError as exc:
        raise ConfigError(f"{where}: bad value for {key}: {value!r}") from exc
    return value


def parse_float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}") from exc


def build_config(values: dict) -> ExperimentConfig:
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return ExperimentConfig(**values)


def load_config(path_or_preset: str) -> ExperimentConfig:
    """Read a config file, or a bundled preset by name (``fig1``, ``fig2``, ...)."""
    path = Path(path_or_preset)
    if path.is_file():
        return parse_config_text(path.read_text(), str(path))
    if path_or_preset in PRESETS:
        text = resources.files("toa_lab.presets").joinpath(f"{path_or_preset}.cfg").read_text()
        return parse_config_text(text, f"preset {path_or_preset}")
    raise ConfigError(f"no config file or preset named {path_or_preset!r} (presets: {', '.join(PRESETS)})")


def with_overrides(cfg: ExperimentConfig, **overrides) -> ExperimentConfig:
    changes = {k: v for k, v in overrides.items() if v is not None}
    return dataclasses.replace(cfg, **changes) if changes else cfg

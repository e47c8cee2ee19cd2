"""Closed-form free evolution of superpositions of Gaussian wave packets.

Units: hbar = m = 1. Each term of a :class:`PacketSpec` is

    g(x, 0) = (2π s²)^(-1/4) exp(-(x - x0)² / (4 s²) + i p0 (x - x0))

so |g|² has standard deviation ``s``. Under free evolution s² becomes the
complex width a(t) = s² + i t/2 and

    g(x, t) = (2π s²)^(-1/4) sqrt(s²/a) exp(-(x - x0 - p0 t)² / (4a)
                                        + i p0 (x - x0 - p0 t / 2)),

with momentum amplitude φ(p) = (2 s²/π)^(1/4) exp(-s² (p - p0)² - i p x0).
Negative times are allowed and mean backward evolution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfcx

from .errors import DomainError

# Nodes per Gauss-Legendre panel when integrating the density over an interval.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


@dataclass(frozen=True)
class GaussianTerm:
    weight: complex
    center: float
    width: float
    momentum: float

    def __post_init__(self):
        if not (self.width > 0 and np.isfinite(self.width)):
            raise DomainError(f"Gaussian width must be positive, got {self.width!r}")
        if not (np.isfinite(self.center) and np.isfinite(self.momentum)):
            raise DomainError("Gaussian center and momentum must be finite")


@dataclass(frozen=True)
class PacketSpec:
    """Weighted sum of Gaussian terms in dimensionless units.

    Use :meth:`normalized` (or :func:`gaussian`) to build a unit-norm state;
    the plain constructor keeps the weights as given.
    """

    terms: tuple[GaussianTerm, ...]
    _arrays: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.terms) == 0:
            raise DomainError("a packet needs at least one term")
        object.__setattr__(self, "terms", tuple(self.terms))
        w = np.array([t.weight for t in self.terms], dtype=complex)
        x0 = np.array([t.center for t in self.terms], dtype=float)
        s = np.array([t.width for t in self.terms], dtype=float)
        p0 = np.array([t.momentum for t in self.terms], dtype=float)
        object.__setattr__(self, "_arrays", (w, x0, s, p0))

    @classmethod
    def normalized(cls, terms) -> "PacketSpec":
        raw = cls(tuple(terms))
        norm = raw.norm()
        if not norm > 0:
            raise DomainError("superposition has zero norm")
        scale = 1.0 / np.sqrt(norm)
        return cls(tuple(
            GaussianTerm(t.weight * scale, t.center, t.width, t.momentum) for t in raw.terms
        ))

    @property
    def weights(self):
        return self._arrays[0]

    @property
    def centers(self):
        return self._arrays[1]

    @property
    def widths(self):
        return self._arrays[2]

    @property
    def momenta(self):
        return self._arrays[3]

    def norm(self) -> float:
        """<ψ|ψ>, from closed-form overlaps of the momentum amplitudes."""
        return float(_pair_sum(self, lower=-np.inf).real)

    def mean_position(self) -> float:
        """Centroid <x> of the initial state."""
        w, x0, s, p0 = self._arrays
        A, B, C, pref = _pair_coefficients(self)
        overlap = pref * np.sqrt(np.pi / A) * np.exp(B * B / (4 * A) + C)
        mean_p = B / (2 * A)
        # i d/dp acting on φ_k gives (x_k - 2i s_k² (p - p_k)) φ_k.
        factor = x0[None, :] - 2j * (s**2)[None, :] * (mean_p - p0[None, :])
        total = np.sum(np.conj(w)[:, None] * w[None, :] * overlap * factor)
        return float(total.real / self.norm())


def gaussian(center: float, momentum: float, width: float = 1.0) -> PacketSpec:
    """Single normalized Gaussian."""
    return PacketSpec.normalized([GaussianTerm(1.0, center, width, momentum)])


def odd_pair(separation: float, width: float = 1.0, momentum: float = 0.0) -> PacketSpec:
    """Antisymmetric pair g(x - d) - g(x + d); odd in x when ``momentum`` is 0."""
    return PacketSpec.normalized([
        GaussianTerm(1.0, separation, width, momentum),
        GaussianTerm(-1.0, -separation, width, momentum),
    ])


@dataclass(frozen=True)
class Point:
    x: float


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b) and self.a < self.b):
            raise DomainError(f"interval detector needs finite a < b, got [{self.a}, {self.b}]")

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)


Detector = Point | Interval


def centered_interval(delta_l: float, center: float = 0.0) -> Interval:
    """The detector region [center - ΔL/2, center + ΔL/2]."""
    if not delta_l > 0:
        raise DomainError(f"detector length must be positive, got {delta_l!r}")
    return Interval(center - 0.5 * delta_l, center + 0.5 * delta_l)


# ---------------------------------------------------------------------------
# Position space
# ---------------------------------------------------------------------------

def _terms_at(x, t, spec):
    """Per-term amplitudes and log-derivatives, shape (n_terms, *broadcast(x, t))."""
    w, x0, s, p0 = spec._arrays
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    shape = (-1,) + (1,) * np.broadcast(x, t).ndim
    w, x0, s, p0 = (v.reshape(shape) for v in (w, x0, s, p0))
    a = s**2 + 0.5j * t
    # Same exponent as in the module docstring, rearranged so the O(p0² t)
    # phases cancel analytically instead of in floating point.
    shifted = x - x0 - 2j * s**2 * p0
    amp = (w * (2 * np.pi * s**2) ** -0.25 * np.sqrt(s**2 / a)
           * np.exp(-shifted**2 / (4 * a) - s**2 * p0**2))
    dlog = -shifted / (2 * a)
    return amp, dlog


def psi(x, t, spec: PacketSpec):
    """Position amplitude ψ(x, t); broadcasts over ``x`` and ``t``."""
    amp, _ = _terms_at(x, t, spec)
    return amp.sum(axis=0)


def psi_dx(x, t, spec: PacketSpec):
    """∂ψ/∂x from the closed form."""
    amp, dlog = _terms_at(x, t, spec)
    return (amp * dlog).sum(axis=0)


def density(x, t, spec: PacketSpec):
    return np.abs(psi(x, t, spec)) ** 2


def flux(x, t, spec: PacketSpec):
    """Probability current J = Im(ψ* ∂ψ/∂x)."""
    amp, dlog = _terms_at(x, t, spec)
    value = amp.sum(axis=0)
    deriv = (amp * dlog).sum(axis=0)
    return np.imag(np.conj(value) * deriv)


def width_at(t, width: float = 1.0):
    """Standard deviation of a freely spreading Gaussian of initial width ``width``."""
    return width * np.sqrt(1 + (np.asarray(t, dtype=float) / (2 * width**2)) ** 2)


def detector_density(t, detector: Detector, spec: PacketSpec):
    """ρ_D(t): |ψ(x_d, t)|² for a point, ∫_D |ψ(x, t)|² dx for an interval.

    Interval masses use composite 20-point Gauss-Legendre panels no wider
    than the narrowest initial width (or the beat length between terms).
    """
    t = np.asarray(t, dtype=float)
    if isinstance(detector, Point):
        return density(detector.x, t, spec)
    if not isinstance(detector, Interval):
        raise DomainError(f"unknown detector {detector!r}")
    p0 = spec.momenta
    beat = np.ptp(p0) if len(p0) > 1 else 0.0
    h = min(spec.widths.min(), np.pi / (beat + 1.0))
    n_panels = max(1, int(np.ceil(detector.length / h)))
    edges = np.linspace(detector.a, detector.b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mids = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mids[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    weights = (half[:, None] * _GL_W[None, :]).ravel()
    rho = density(nodes[:, None], t.ravel()[None, :], spec)
    return (weights @ rho).reshape(t.shape)


# ---------------------------------------------------------------------------
# Momentum space
# ---------------------------------------------------------------------------

def psi_momentum(p, spec: PacketSpec, t: float = 0.0):
    """Momentum amplitude φ(p, t) = φ(p) exp(-i p² t / 2)."""
    w, x0, s, p0 = spec._arrays
    p = np.asarray(p, dtype=float)
    shape = (-1,) + (1,) * p.ndim
    w, x0, s, p0 = (v.reshape(shape) for v in (w, x0, s, p0))
    amp = w * (2 * s**2 / np.pi) ** 0.25 * np.exp(-s**2 * (p - p0) ** 2 - 1j * p * x0)
    return amp.sum(axis=0) * np.exp(-0.5j * p**2 * t)


def momentum_density(p, spec: PacketSpec):
    return np.abs(psi_momentum(p, spec)) ** 2


def zero_momentum_density(spec: PacketSpec) -> float:
    """|φ(0)|², the coefficient of the 1/|t| tail of |ψ(x, t)|²."""
    return float(momentum_density(0.0, spec))


def _pair_coefficients(spec):
    """conj(φ_j) φ_k = pref · exp(-A p² + B p + C) for every pair (j, k)."""
    _, x0, s, p0 = spec._arrays
    sj, sk = s[:, None], s[None, :]
    pj, pk = p0[:, None], p0[None, :]
    xj, xk = x0[:, None], x0[None, :]
    A = (sj**2 + sk**2).astype(complex)
    B = 2 * sj**2 * pj + 2 * sk**2 * pk + 1j * (xj - xk)
    C = -(sj**2) * pj**2 - sk**2 * pk**2 + 0j
    pref = (2 * sj**2 / np.pi) ** 0.25 * (2 * sk**2 / np.pi) ** 0.25
    return A, B, C, pref


def _half_line_gaussian(A, B, C):
    """∫_0^∞ exp(-A p² + B p + C) dp without overflow."""
    z = -B / (2 * np.sqrt(A))
    scale = 0.5 * np.sqrt(np.pi / A)
    full = 2 * np.exp(B * B / (4 * A) + C)
    with np.errstate(over="ignore", invalid="ignore"):
        direct = np.exp(C) * erfcx(z)
        reflected = full - np.exp(C) * erfcx(-z)
    return scale * np.where(z.real >= 0, direct, reflected)


def _pair_sum(spec, lower):
    w = spec._arrays[0]
    A, B, C, pref = _pair_coefficients(spec)
    if lower == -np.inf:
        integral = np.sqrt(np.pi / A) * np.exp(B * B / (4 * A) + C)
    elif lower == 0.0:
        integral = _half_line_gaussian(A, B, C)
    else:
        raise DomainError("lower must be -inf or 0")
    return np.sum(np.conj(w)[:, None] * w[None, :] * pref * integral)


def positive_momentum_mass(spec: PacketSpec) -> float:
    """∫_0^∞ |φ(p)|² dp in closed form."""
    return float(_pair_sum(spec, lower=0.0).real)


def negative_momentum_mass(spec: PacketSpec) -> float:
    return spec.norm() - positive_momentum_mass(spec)

"""Time-of-arrival distributions and non-arrival probabilities.

Four proposals are compared for a free packet and a detector:

* ``K``  Kijowski:   (1/2π) |∫_0^∞ √p φ(p) e^{i(p x_d - p² t/2)} dp|² / N_K
* ``F``  flux:       J(x_d, t) / N_F,  N_F = ∫_0^∞ J(x_d, t) dt
* ``SC`` semi-classical: pushforward of |φ(p)|² under t = (x_d - <x>)/p
* ``QC`` quantum clock:  ρ_D(t) / N_QC(T) on the window [-T/2, T/2]

K and SC are renormalized by the momentum mass moving towards the detector;
everything is in units with hbar = m = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import packet as pk
from .errors import DegenerateNormalizationError, DimensionalInconsistencyError, DomainError
from .numerics import integrate_adaptive, integrate_damped_oscillatory

KINDS = ("K", "F", "SC", "QC")
KFSC = ("K", "F", "SC")

TIME_TOL = 1e-12


@dataclass(frozen=True)
class ToADistribution:
    kind: str
    times: np.ndarray
    density: np.ndarray
    raw_norm: float
    window: tuple[float, float] | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown distribution kind {self.kind!r}")
        if np.any(np.diff(self.times) <= 0):
            raise DomainError("sample times must be strictly increasing")
        if not np.all(np.isfinite(self.density)):
            raise DomainError("densities must be finite")

    def peak_time(self) -> float:
        return float(self.times[np.argmax(self.density)])


# ---------------------------------------------------------------------------
# Time integration with a long-time tail
# ---------------------------------------------------------------------------

def characteristic_time(spec: pk.PacketSpec, detector) -> float:
    """Time after which every term has passed or spread over the detector.

    Past this knee densities at the detector decay like a power of t, and
    time integrals switch to the logarithmic variable.
    """
    xs = [detector.x] if isinstance(detector, pk.Point) else [detector.a, detector.b]
    knee = 1.0
    for x in xs:
        for x0, s, p0 in zip(spec.centers, spec.widths, spec.momenta):
            travel = (abs(x - x0) + 10 * s) / (abs(p0) + 1 / (2 * s))
            knee = max(knee, 2 * s * s, travel)
    return 2.0 * knee


def _transit_times(spec, detector):
    x = detector.x if isinstance(detector, pk.Point) else detector.midpoint
    out = []
    for x0, p0 in zip(spec.centers, spec.momenta):
        if p0 != 0:
            out.append((x - x0) / p0)
    return out


def _integrate_positive(f, lo, hi, knee, breaks, tol):
    """∫_lo^hi f(t) dt for 0 <= lo < hi <= inf."""
    total = 0.0
    core_hi = min(hi, knee)
    if lo < core_hi:
        pts = sorted({lo, core_hi, *[b for b in breaks if lo < b < core_hi]})
        for a, b in zip(pts[:-1], pts[1:]):
            total += integrate_adaptive(f, a, b, tol=tol).value
    tail_lo = max(lo, knee)
    if tail_lo < hi and math.isinf(hi):
        # t = t0 / u²: tails decaying like t^-1.5 or faster stay bounded in u.
        def g(u):
            return f(tail_lo / u**2) * (2 * tail_lo / u**3)

        total += integrate_adaptive(g, 0.0, 1.0, tol=tol).value
    elif tail_lo < hi:
        def g(y):
            t = np.exp(y)
            return f(t) * t

        total += integrate_adaptive(g, math.log(tail_lo), math.log(hi), tol=tol).value
    return total


def integrate_time(f, lo, hi, knee, breaks=(), tol=TIME_TOL, knee_negative=None):
    """∫_lo^hi f(t) dt over any real range, splitting at 0 and at ``knee``.

    ``f`` is vectorized in ``t``. Power-law tails beyond the knee are
    integrated in ln t, where they are smooth and slowly varying.
    ``knee_negative`` overrides the knee on the t < 0 side.
    """
    if hi <= lo:
        return 0.0
    total = 0.0
    if hi > 0:
        total += _integrate_positive(f, max(lo, 0.0), hi, knee, [b for b in breaks if b > 0], tol)
    if lo < 0:
        total += _integrate_positive(lambda u: f(-u), max(-hi, 0.0), -lo,
                                     knee if knee_negative is None else knee_negative,
                                     [-b for b in breaks if b < 0], tol)
    return total


# ---------------------------------------------------------------------------
# Kijowski
# ---------------------------------------------------------------------------

def kijowski_amplitude(t: float, x_d: float, spec: pk.PacketSpec) -> complex:
    """∫_0^∞ √p φ(p) exp(i (p x_d - p² t / 2)) dp."""
    total = 0.0j
    for w, x0, s, p0 in zip(spec.weights, spec.centers, spec.widths, spec.momenta):
        a = s * s + 0.5j * t
        b = 2 * s * s * p0 + 1j * (x_d - x0)
        c = -s * s * p0 * p0
        res = integrate_damped_oscillatory(a, b, c)
        total += w * (2 * s * s / np.pi) ** 0.25 * res.value
    return complex(total)


def kijowski_normalization(spec: pk.PacketSpec) -> float:
    n_k = pk.positive_momentum_mass(spec)
    if not n_k > 0:
        raise DegenerateNormalizationError("state has no right-moving momentum component")
    return n_k


def _require_point(detector, what):
    if not isinstance(detector, pk.Point):
        raise DomainError(f"{what} needs a point detector, got {detector!r}")


def pi_kijowski(t, detector: pk.Point, spec: pk.PacketSpec):
    """Kijowski density; normalized over t in (-inf, inf)."""
    _require_point(detector, "Kijowski distribution")
    n_k = kijowski_normalization(spec)
    t_arr = np.asarray(t, dtype=float)
    out = np.empty(t_arr.shape)
    for idx, tv in np.ndenumerate(t_arr):
        out[idx] = abs(kijowski_amplitude(float(tv), detector.x, spec)) ** 2 / (2 * np.pi)
    return out / n_k if out.ndim else float(out) / n_k


# ---------------------------------------------------------------------------
# Flux
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def flux_normalization(spec: pk.PacketSpec, x_d: float) -> float:
    """N_F = ∫_0^∞ J(x_d, t) dt (net probability crossing x_d after t = 0)."""
    det = pk.Point(x_d)
    knee = characteristic_time(spec, det)
    return integrate_time(lambda t: pk.flux(x_d, t, spec), 0.0, math.inf, knee,
                          _transit_times(spec, det))


def pi_flux(t, detector: pk.Point, spec: pk.PacketSpec):
    """Flux density J/N_F for t >= 0 (zero before preparation); may dip below 0."""
    _require_point(detector, "flux distribution")
    n_f = flux_normalization(spec, detector.x)
    if not n_f > 0:
        raise DegenerateNormalizationError(
            f"net flux through x={detector.x} is {n_f:.3e}; the state never crosses rightward"
        )
    t_arr = np.asarray(t, dtype=float)
    j = np.where(t_arr >= 0, pk.flux(detector.x, t_arr, spec), 0.0)
    return j / n_f


# ---------------------------------------------------------------------------
# Semi-classical
# ---------------------------------------------------------------------------

def semiclassical_normalization(spec: pk.PacketSpec, x_d: float) -> float:
    distance = x_d - spec.mean_position()
    if distance > 0:
        n_sc = pk.positive_momentum_mass(spec)
    elif distance < 0:
        n_sc = pk.negative_momentum_mass(spec)
    else:
        n_sc = 0.0
    if not n_sc > 0:
        raise DegenerateNormalizationError("no momentum directed towards the detector")
    return n_sc


def pi_semiclassical(t, detector: pk.Point, spec: pk.PacketSpec):
    """(|d|/t²) |φ(d/t)|² / N_SC with d the distance from the initial centroid."""
    _require_point(detector, "semi-classical distribution")
    n_sc = semiclassical_normalization(spec, detector.x)
    distance = detector.x - spec.mean_position()
    t_arr = np.asarray(t, dtype=float)
    safe = np.where(t_arr > 0, t_arr, 1.0)
    value = abs(distance) / safe**2 * pk.momentum_density(distance / safe, spec)
    return np.where(t_arr > 0, value, 0.0) / n_sc


# ---------------------------------------------------------------------------
# Quantum clock
# ---------------------------------------------------------------------------

def qc_denominators(spec: pk.PacketSpec, detector, T_values, tol=TIME_TOL) -> np.ndarray:
    """N_QC(T) = ∫_{-T/2}^{T/2} ρ_D(t) dt for increasing ``T_values``.

    Computed cumulatively, window shell by window shell, so the returned
    sequence is nondecreasing by construction (every shell integrates a
    nonnegative density with positive Kronrod weights).
    """
    T_values = np.asarray(T_values, dtype=float)
    if T_values.ndim != 1 or np.any(T_values <= 0) or np.any(np.diff(T_values) <= 0):
        raise DomainError("T values must be positive and strictly increasing")
    knee = characteristic_time(spec, detector)
    breaks = _transit_times(spec, detector)

    def rho(t):
        return pk.detector_density(t, detector, spec)

    out = np.empty_like(T_values)
    acc = 0.0
    prev = 0.0
    for i, T in enumerate(T_values):
        half = 0.5 * T
        acc += integrate_time(rho, prev, half, knee, breaks, tol)
        acc += integrate_time(rho, -half, -prev, knee, breaks, tol)
        out[i] = acc
        prev = half
    return out


def qc_denominator(spec: pk.PacketSpec, detector, T: float) -> float:
    return float(qc_denominators(spec, detector, [T])[0])


def pi_qc(t, detector, spec: pk.PacketSpec, T: float, denominator: float | None = None):
    """ρ_D(t) / N_QC(T) for t in [-T/2, T/2]."""
    if not T > 0:
        raise DomainError(f"window length must be positive, got {T!r}")
    t_arr = np.asarray(t, dtype=float)
    if np.any(np.abs(t_arr) > 0.5 * T):
        raise DomainError(f"t outside the window [-{0.5 * T:g}, {0.5 * T:g}]")
    n_qc = qc_denominator(spec, detector, T) if denominator is None else denominator
    if not n_qc > 0:
        raise DegenerateNormalizationError("detector never sees any probability in the window")
    return pk.detector_density(t_arr, detector, spec) / n_qc


def qc_arrival_probability(spec, detector, t1: float, t2: float, T_values,
                           tol=TIME_TOL) -> np.ndarray:
    """∫_{t1}^{t2} Π_QC(t; T) dt for each window length T (all windows must contain [t1, t2])."""
    T_values = np.asarray(T_values, dtype=float)
    if not t1 < t2:
        raise DomainError("need t1 < t2")
    if np.any(0.5 * T_values < max(abs(t1), abs(t2))):
        raise DomainError("every window must contain [t1, t2]")
    knee = characteristic_time(spec, detector)
    mass = integrate_time(lambda t: pk.detector_density(t, detector, spec), t1, t2, knee,
                          _transit_times(spec, detector), tol)
    denominators = qc_denominators(spec, detector, T_values, tol)
    if np.any(denominators <= 0):
        raise DegenerateNormalizationError("detector never sees any probability in the window")
    return mass / denominators


def nonarrival_qc(spec: pk.PacketSpec, detector, T, denominators=None, tol=TIME_TOL):
    """1 - (1/T) ∫_{-T/2}^{T/2} dt ∫_D dx |ψ(x, t)|²; scalar or increasing array of T."""
    if not isinstance(detector, pk.Interval):
        raise DimensionalInconsistencyError(
            "the time-averaged detector mass is only a probability for an interval "
            "detector; for a point it carries units of 1/length"
        )
    T_arr = np.atleast_1d(np.asarray(T, dtype=float))
    if denominators is None:
        denominators = qc_denominators(spec, detector, T_arr, tol)
    out = 1.0 - np.asarray(denominators) / T_arr
    return out if np.ndim(T) else float(out[0])


# ---------------------------------------------------------------------------
# K / F / SC non-arrival
# ---------------------------------------------------------------------------

def density_function(kind: str, detector: pk.Point, spec: pk.PacketSpec):
    """Vectorized t -> Π_kind(t) for the three T-independent proposals."""
    if kind == "K":
        return lambda t: pi_kijowski(t, detector, spec)
    if kind == "F":
        return lambda t: pi_flux(t, detector, spec)
    if kind == "SC":
        return lambda t: pi_semiclassical(t, detector, spec)
    raise DomainError(f"expected one of {KFSC}, got {kind!r}")


def nonarrival_kfsc(kind: str, spec: pk.PacketSpec, detector: pk.Point, T, tol=TIME_TOL):
    """Tail mass ∫_T^∞ Π dt, computed as 1 - ∫_0^T Π dt; scalar or increasing array of T."""
    _require_point(detector, "K/F/SC non-arrival probability")
    T_arr = np.atleast_1d(np.asarray(T, dtype=float))
    if np.any(T_arr < 0) or np.any(np.diff(T_arr) < 0):
        raise DomainError("cutoff times must be nonnegative and nondecreasing")
    f = density_function(kind, detector, spec)
    knee = characteristic_time(spec, detector)
    breaks = _transit_times(spec, detector)
    out = np.empty_like(T_arr)
    acc = 0.0
    prev = 0.0
    for i, T_i in enumerate(T_arr):
        acc += integrate_time(f, prev, T_i, knee, breaks, tol)
        out[i] = 1.0 - acc
        prev = T_i
    return out if np.ndim(T) else float(out[0])


def total_mass(kind: str, detector: pk.Point, spec: pk.PacketSpec, lower: float = 0.0,
               tol: float = TIME_TOL) -> float:
    """∫_lower^∞ Π_kind dt (lower = -inf for the Kijowski normalization check).

    Far-launched packets give the Kijowski density a fast, zero-mean ripple
    (the main peak interfering with the p = 0 edge tail); a looser ``tol``
    stops the quadrature from resolving it period by period.
    """
    f = density_function(kind, detector, spec)
    knee = characteristic_time(spec, detector)
    return integrate_time(f, lower, math.inf, knee, _transit_times(spec, detector), tol=tol,
                          knee_negative=max(knee, backward_knee(spec, detector)))


def backward_knee(spec: pk.PacketSpec, detector: pk.Point) -> float:
    """Scale beyond which the Kijowski density at t < 0 is in its power-law tail.

    The p = 0 edge of the momentum integral leaves an algebraic tail that is
    flat in t until |t| reaches (x_d - x0)² / s², and decays like |t|^-3 after.
    """
    return 2.0 * max((abs(detector.x - x0) + 10 * s) ** 2 / (s * s)
                     for x0, s in zip(spec.centers, spec.widths))


# ---------------------------------------------------------------------------
# Sampled distributions
# ---------------------------------------------------------------------------

def sample_distribution(kind: str, times, detector, spec: pk.PacketSpec,
                        T: float | None = None) -> ToADistribution:
    times = np.asarray(times, dtype=float)
    if kind == "QC":
        if T is None:
            raise DomainError("QC needs a window length T")
        n_qc = qc_denominator(spec, detector, T)
        dens = pi_qc(times, detector, spec, T, denominator=n_qc)
        return ToADistribution("QC", times, dens, n_qc, (-0.5 * T, 0.5 * T))
    _require_point(detector, f"{kind} distribution")
    if kind == "K":
        return ToADistribution("K", times, pi_kijowski(times, detector, spec),
                               kijowski_normalization(spec), (-math.inf, math.inf))
    if kind == "F":
        n_f = flux_normalization(spec, detector.x)
        dens = pi_flux(times, detector, spec)
        return ToADistribution("F", times, dens, n_f, (0.0, math.inf),
                               extra={"raw_flux": dens * n_f, "backflow": bool(np.any(dens < 0))})
    if kind == "SC":
        return ToADistribution("SC", times, pi_semiclassical(times, detector, spec),
                               semiclassical_normalization(spec, detector.x), (0.0, math.inf))
    raise DomainError(f"unknown distribution kind {kind!r}")

"""Long-window behaviour of the quantum-clock denominator.

For large |t| a free state satisfies

    ψ(x, t) ≈ (i t)^(-1/2) exp(i x² / 2t) φ(x / t),

so ρ_D(t) ≈ |φ(0)|² / |t| at a point detector (times ΔL for an interval).
Both halves of the window [-T/2, T/2] carry this tail, hence

    N_QC(T) ≈ 2 |φ(0)|² ln T + const      (point),
    N_QC(T) ≈ 2 ΔL |φ(0)|² ln T + const   (interval of length ΔL).

When φ(0) = 0 the tail decays at least like 1/|t|³ and N_QC stays bounded.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import distributions as dist
from . import packet as pk
from .errors import DomainError, NonConvergenceError


@dataclass(frozen=True)
class WindowSweep:
    T: np.ndarray
    qc_denominator: np.ndarray
    p_na_qc: np.ndarray | None = None
    p_na_kfsc: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.any(np.diff(self.T) <= 0):
            raise DomainError("sweep T values must be strictly increasing")


@dataclass(frozen=True)
class LogFit:
    slope: float
    intercept: float
    residual_rms: float
    fit_range: tuple[float, float]

    def __call__(self, T):
        return self.slope * np.log(T) + self.intercept


def qc_denominator_sweep(spec: pk.PacketSpec, detector, T_list, kfsc: bool = False,
                         tol: float = dist.TIME_TOL) -> WindowSweep:
    """N_QC(T) for every T, plus non-arrival probabilities where defined.

    With ``kfsc`` the K/F/SC tail masses are added for the detector point
    (the interval midpoint for interval detectors).
    """
    T = np.asarray(T_list, dtype=float)
    denominators = dist.qc_denominators(spec, detector, T, tol)
    if not np.all(np.isfinite(denominators)):
        raise NonConvergenceError("non-finite QC denominator in sweep")
    p_na_qc = None
    if isinstance(detector, pk.Interval):
        p_na_qc = dist.nonarrival_qc(spec, detector, T, denominators=denominators)
    p_na = {}
    if kfsc:
        point = detector if isinstance(detector, pk.Point) else pk.Point(detector.midpoint)
        for kind in dist.KFSC:
            p_na[kind] = dist.nonarrival_kfsc(kind, spec, point, T, tol)
    return WindowSweep(T, denominators, p_na_qc, p_na)


def fit_log(sweep: WindowSweep, fit_range=None) -> LogFit:
    """Least-squares fit N_QC(T) = slope · ln T + intercept over ``fit_range``."""
    T = sweep.T
    N = sweep.qc_denominator
    lo, hi = (T[0], T[-1]) if fit_range is None else fit_range
    mask = (T >= lo) & (T <= hi)
    if mask.sum() < 4:
        raise DomainError(f"need at least 4 sweep points in [{lo:g}, {hi:g}], got {mask.sum()}")
    x = np.log(T[mask])
    design = np.column_stack([x, np.ones_like(x)])
    coef, _, rank, _ = np.linalg.lstsq(design, N[mask], rcond=None)
    if rank < 2:
        raise NonConvergenceError("rank-deficient log fit (all T equal?)")
    resid = N[mask] - design @ coef
    return LogFit(float(coef[0]), float(coef[1]), float(np.sqrt(np.mean(resid**2))),
                  (float(T[mask][0]), float(T[mask][-1])))


def predicted_slope(spec: pk.PacketSpec, detector) -> float:
    """Closed-form d N_QC / d ln T for the symmetric window."""
    phi0 = pk.zero_momentum_density(spec)
    if isinstance(detector, pk.Interval):
        return 2.0 * detector.length * phi0
    return 2.0 * phi0


def local_slopes(sweep: WindowSweep) -> np.ndarray:
    """dN/d ln T between consecutive sweep points."""
    return np.diff(sweep.qc_denominator) / np.diff(np.log(sweep.T))


def asymptotic_onset(sweep: WindowSweep, variation: float = 0.02) -> float | None:
    """Smallest T from which the local slope varies by < ``variation`` over a decade."""
    slopes = local_slopes(sweep)
    T_left = sweep.T[:-1]
    for i, T0 in enumerate(T_left):
        window = slopes[(T_left >= T0) & (T_left <= 10 * T0)]
        if T_left[-1] < 10 * T0 or len(window) < 2:
            break
        lo, hi = window.min(), window.max()
        if lo > 0 and hi / lo - 1 < variation:
            return float(T0)
    return None


def is_bounded(sweep: WindowSweep, growth: float = 0.01) -> bool:
    """True when N_QC grew by less than ``growth`` (relative) over the last decade."""
    T, N = sweep.T, sweep.qc_denominator
    earlier = N[T <= T[-1] / 10]
    if len(earlier) == 0:
        raise DomainError("sweep must span at least one decade")
    return bool((N[-1] - earlier[-1]) <= growth * N[-1])


def verify_vanishing(spec: pk.PacketSpec, detector, t_probe: float, T_list) -> np.ndarray:
    """Π_QC(t_probe; T) for each T in ``T_list`` (increasing)."""
    T = np.asarray(T_list, dtype=float)
    if np.any(0.5 * T < abs(t_probe)):
        raise DomainError("t_probe must lie inside every window")
    denominators = dist.qc_denominators(spec, detector, T)
    return pk.detector_density(t_probe, detector, spec) / denominators


def vanishing_bound_holds(values, T_list, slack: float = 0.1) -> bool:
    """Nonincreasing and last <= first · ln T_first / ln T_last · (1 + slack)."""
    values = np.asarray(values)
    T = np.asarray(T_list, dtype=float)
    if np.any(np.diff(values) > 0):
        return False
    return bool(values[-1] <= values[0] * np.log(T[0]) / np.log(T[-1]) * (1 + slack))


def nonarrival_lower_bound(fit: LogFit, T):
    """1 - 2 · slope · ln T / T, the large-T floor for the QC non-arrival probability."""
    T = np.asarray(T, dtype=float)
    return 1.0 - 2.0 * fit.slope * np.log(T) / T

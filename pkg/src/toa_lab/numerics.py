"""Quadrature engines and the spectral free-propagator oracle.

This module deliberately knows nothing about wave packets: the spectral
propagator is used to validate the closed forms in :mod:`toa_lab.packet`
and must stay independent of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import AliasingError, DomainError, NonConvergenceError

# 7-point Gauss / 15-point Kronrod pair (QUADPACK qk15 abscissae and weights).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(15)
_GAUSS_W[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureResult:
    value: complex | float
    abs_error_estimate: float
    evaluations: int


def _gk15(f, a, b):
    """Apply the G7/K15 pair to each panel [a[i], b[i]] with one call to ``f``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x.ravel())).reshape(x.shape)
    kronrod = half * (fx @ _KRONROD_W)
    gauss = half * (fx @ _GAUSS_W)
    resabs = np.abs(half) * (np.abs(fx) @ _KRONROD_W)
    err = np.abs(kronrod - gauss)
    # Below this the K15/G7 difference is dominated by rounding.
    err = np.where(err <= 50 * _EPS * resabs, 0.0, err)
    return kronrod, err, resabs


def _map_infinite(f, a, b):
    """Return ``(g, lo, hi)`` with ∫_a^b f = ∫_lo^hi g over a finite range.

    A semi-infinite range [a, inf) uses x = a + (1/v - 1)**2 for v in (0, 1],
    which keeps power-law tails down to 1/x**1.5 bounded in v. Doubly infinite
    ranges are split at the origin.
    """
    if math.isinf(a) and math.isinf(b):
        def g(v):
            x = (1.0 / v - 1.0) ** 2
            jac = 2.0 * (1.0 / v - 1.0) / v**2
            return (f(x) + f(-x)) * jac
        return g, 0.0, 1.0
    if math.isinf(b):
        def g(v):
            w = 1.0 / v - 1.0
            return f(a + w * w) * (2.0 * w / v**2)
        return g, 0.0, 1.0
    if math.isinf(a):
        def g(v):
            w = 1.0 / v - 1.0
            return f(b - w * w) * (2.0 * w / v**2)
        return g, 0.0, 1.0
    return f, a, b


def integrate_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-10,
    rtol: float = 0.0,
    max_depth: int = 60,
    max_panels: int = 200_000,
) -> QuadratureResult:
    """Adaptive Gauss-Kronrod (G7/K15) quadrature of ``f`` over [a, b].

    ``f`` must accept a 1-D numpy array and return real or complex values of
    the same shape. Either bound may be infinite. Panels are bisected until
    the summed error estimate drops below ``max(tol, rtol * |value|)``. Each
    round bisects the worst panel and every panel holding more than an equal
    share of the target, so ``f`` is called once per round on all new nodes.
    """
    if not tol > 0 and not rtol > 0:
        raise DomainError("need tol > 0 or rtol > 0")
    if not a < b:
        if a == b:
            return QuadratureResult(0.0, 0.0, 0)
        raise DomainError(f"integration bounds must satisfy a < b, got a={a}, b={b}")

    g, lo, hi = _map_infinite(f, float(a), float(b))

    a_p = np.array([lo])
    b_p = np.array([hi])
    val, err, _ = _gk15(g, a_p, b_p)
    evaluations = 15
    depth = np.zeros(1, dtype=int)

    while True:
        total = val.sum()
        total_err = err.sum()
        target = max(tol, rtol * abs(total))
        if total_err <= target:
            return QuadratureResult(total, float(total_err), evaluations)

        # Split every panel above an equal share of half the target, and always the worst.
        split = err > 0.5 * target / len(err)
        split[np.argmax(err)] = True
        if (depth[split] >= max_depth).any() or len(err) + split.sum() > max_panels:
            worst = int(np.argmax(err))
            raise NonConvergenceError(
                f"adaptive quadrature did not converge on [{a}, {b}] "
                f"(estimate {total_err:.3e} > target {target:.3e})",
                worst_panel=(float(a_p[worst]), float(b_p[worst]), float(err[worst])),
            )

        sa, sb, sd = a_p[split], b_p[split], depth[split]
        mid = 0.5 * (sa + sb)
        ca = np.concatenate([sa, mid])
        cb = np.concatenate([mid, sb])
        cval, cerr, _ = _gk15(g, ca, cb)
        evaluations += 15 * len(ca)
        keep = ~split
        a_p = np.concatenate([a_p[keep], ca])
        b_p = np.concatenate([b_p[keep], cb])
        val = np.concatenate([val[keep], cval])
        err = np.concatenate([err[keep], cerr])
        depth = np.concatenate([depth[keep], sd + 1, sd + 1])


def integrate_panels(f, breakpoints, tol=1e-10, rtol=0.0) -> QuadratureResult:
    """Sum of :func:`integrate_adaptive` over consecutive breakpoint intervals."""
    breakpoints = list(breakpoints)
    value = 0.0
    error = 0.0
    evaluations = 0
    n = max(len(breakpoints) - 1, 1)
    for lo, hi in zip(breakpoints[:-1], breakpoints[1:]):
        if hi <= lo:
            continue
        r = integrate_adaptive(f, lo, hi, tol=tol / n, rtol=rtol)
        value += r.value
        error += r.abs_error_estimate
        evaluations += r.evaluations
    return QuadratureResult(value, error, evaluations)


# ---------------------------------------------------------------------------
# Damped oscillatory integrals  ∫_0^∞ √p exp(-a p² + b p + c) dp,  Re a > 0
# ---------------------------------------------------------------------------

def integrate_damped_oscillatory(a: complex, b: complex, c: complex = 0.0,
                                 rtol: float = 1e-10, atol: float = 1e-300,
                                 margin: float = 80.0) -> QuadratureResult:
    """∫_0^∞ √p · exp(-a p² + b p + c) dp for complex ``a`` with Re a > 0.

    With a = s² + i t/2 and b = 2 s² p0 + i L this is a Gaussian momentum
    amplitude times the unit-modulus chirp exp(i (L p - t p²/2)). On the real
    axis it oscillates through ~L·p_max radians, so the path is deformed:

    1. the segment p = i e^{iθ} y, 0 <= y <= y0, from the origin to the foot of
       the perpendicular onto the steepest-descent line of the saddle
       p_s = b / (2a), where θ = -arg(a)/2. Along it |integrand| falls
       monotonically away from p = 0 while it oscillates, so only an
       O(1/|b|) neighbourhood of the endpoint contributes;
    2. the half-line p = e^{iθ} (r + i y0), r >= 0, through the saddle, on
       which the phase is constant and the modulus is Gaussian in r.

    For t >> s² the saddle sits at the stationary-phase point p* = L/t. Both
    pieces stay inside |arg p| < 3π/4, so the principal √p branch is
    continuous and Cauchy's theorem applies; the arc at infinity lies in the
    sector where Re(a p²) > 0.
    """
    a = complex(a)
    b = complex(b)
    c = complex(c)
    if not a.real > 0:
        raise DomainError("need Re(a) > 0 for a decaying integrand")

    rot = np.exp(-0.5j * np.angle(a))            # e^{iθ}
    mod_a = abs(a)
    brot = b * rot
    y0 = brot.imag / (2 * mod_a)
    ridge = brot.real / (2 * mod_a)             # saddle position along the half-line
    half_width = math.sqrt(margin / mod_a) + 1.0 / math.sqrt(mod_a)

    def on_segment(y):
        p = 1j * rot * y
        return np.sqrt(p) * np.exp(-a * p * p + b * p + c) * (1j * rot)

    def on_line(r):
        p = rot * (r + 1j * y0)
        return np.sqrt(p) * np.exp(-a * p * p + b * p + c) * rot

    value = 0.0j
    error = 0.0
    evaluations = 0
    if y0 != 0.0:
        # Modulus on the segment is exp(|a| (y² - 2 y0 y)) <= exp(-|a y0| y).
        reach = min(abs(y0), 2 * margin / abs(brot.imag))
        lo, hi = (0.0, reach) if y0 > 0 else (-reach, 0.0)
        seg = integrate_adaptive(on_segment, lo, hi, tol=atol, rtol=rtol)
        value += seg.value if y0 > 0 else -seg.value
        error += seg.abs_error_estimate
        evaluations += seg.evaluations
    # Along the line log|integrand| = -|a| (r - ridge)² + const. Below the ridge the
    # modulus rises monotonically, so [0, ridge - width] is negligible. A ridge
    # behind the origin puts the maximum at r = 0 instead, and the cut-off must be
    # measured from there.
    upper = ridge + math.sqrt(margin / mod_a + min(ridge, 0.0) ** 2) + 1.0 / math.sqrt(mod_a)
    for lo, hi in ((ridge - half_width, ridge), (ridge, upper)):
        lo = max(lo, 0.0)
        if hi <= lo:
            continue
        line = integrate_adaptive(on_line, lo, hi, tol=atol, rtol=rtol)
        value += line.value
        error += line.abs_error_estimate
        evaluations += line.evaluations
    return QuadratureResult(complex(value), float(error), evaluations)


# ---------------------------------------------------------------------------
# Spectral free propagator (hbar = m = 1)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridState:
    """Wave function sampled on the periodic grid x_j = x_min + j dx, j < n."""

    x_min: float
    x_max: float
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1):
            raise DomainError(f"grid size must be a power of two, got {self.n}")
        if not self.x_min < self.x_max:
            raise DomainError("need x_min < x_max")
        if np.shape(self.amplitudes) != (self.n,):
            raise DomainError("amplitudes must have shape (n,)")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    @property
    def momenta(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.dx)

    def boundary_ratio(self, edge: int = 4) -> float:
        mag = np.abs(self.amplitudes)
        peak = mag.max()
        if peak == 0:
            return 0.0
        return float(max(mag[:edge].max(), mag[-edge:].max()) / peak)


def sample_grid(f, x_min: float, x_max: float, n: int) -> GridState:
    """Sample the callable ``f(x)`` on a fresh grid."""
    dx = (x_max - x_min) / n
    x = x_min + dx * np.arange(n)
    return GridState(x_min, x_max, n, np.asarray(f(x), dtype=complex))


def suggest_grid(centres, widths, momenta, t_max: float) -> tuple[float, float, int]:
    """Grid bounds and size for propagating Gaussians up to ``|t_max|``.

    The span covers every term's path plus 12 spread widths on either side;
    the momentum lattice covers |p| <= max|p0| + 8/min(width).
    """
    centres = np.atleast_1d(np.asarray(centres, dtype=float))
    widths = np.atleast_1d(np.asarray(widths, dtype=float))
    momenta = np.atleast_1d(np.asarray(momenta, dtype=float))
    t = abs(float(t_max))
    spread = widths * np.sqrt(1 + (t / (2 * widths**2)) ** 2)
    ends = np.concatenate([centres, centres + momenta * t])
    x_min = float(ends.min() - 12 * spread.max())
    x_max = float(ends.max() + 12 * spread.max())
    p_cover = float(np.abs(momenta).max() + 8.0 / widths.min())
    n_needed = (x_max - x_min) * p_cover / np.pi
    n = 1 << max(6, math.ceil(math.log2(max(n_needed, 2))))
    return x_min, x_max, n


def propagate_spectral(g: GridState, t: float, boundary_tol: float = 1e-6) -> GridState:
    """Exact free evolution of a grid state by time ``t``.

    Free evolution is diagonal in momentum, so one FFT, a multiplication by
    exp(-i p² t / 2) and an inverse FFT evolve over any ``t`` without
    splitting error. Raises :class:`AliasingError` if the evolved state
    reaches the grid boundary.
    """
    if g.norm() > 1 + 1e-9:
        raise DomainError(f"grid state norm {g.norm():.12g} exceeds 1")
    if g.boundary_ratio() > 1e-8:
        raise AliasingError("initial state is not contained in the grid; widen it")
    if t == 0:
        return g
    phase = np.exp(-0.5j * g.momenta**2 * t)
    out = np.fft.ifft(np.fft.fft(g.amplitudes) * phase)
    evolved = replace(g, amplitudes=out)
    if evolved.boundary_ratio() > boundary_tol:
        raise AliasingError(
            f"evolved state wraps around the grid at t={t} "
            f"(edge/peak = {evolved.boundary_ratio():.2e}); use a wider grid"
        )
    return evolved

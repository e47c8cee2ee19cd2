import ast
import math
from pathlib import Path

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import trapezoid

import toa_lab.numerics as nm
from toa_lab import packet as pk
from toa_lab.errors import AliasingError, DomainError, NonConvergenceError

# (integrand, a, b, exact value)
LIBRARY = [
    (lambda x: x**2, 0.0, 1.0, 1 / 3),
    (lambda t: np.exp(-t), 0.0, math.inf, 1.0),
    (np.sin, 0.0, math.pi, 2.0),
    (np.cos, 0.0, 50.0, math.sin(50.0)),
    (lambda x: np.exp(-x * x), -math.inf, math.inf, math.sqrt(math.pi)),
    (lambda x: 1 / (1 + x * x), -math.inf, math.inf, math.pi),
    (np.sqrt, 0.0, 1.0, 2 / 3),
    (lambda x: np.log(x), 0.0, 1.0, -1.0),
    (lambda x: 1 / np.sqrt(x), 0.0, 1.0, 2.0),
    (lambda x: x**9, -1.0, 2.0, (2**10 - 1) / 10),
    (lambda x: np.exp(x), -3.0, 2.0, math.exp(2) - math.exp(-3)),
    (lambda x: 1 / x, 1.0, 1e6, math.log(1e6)),
    (lambda x: np.abs(x - 0.3), 0.0, 1.0, 0.5 * 0.3**2 + 0.5 * 0.7**2),
    (lambda x: np.exp(-x) * np.sin(x), 0.0, math.inf, 0.5),
    (lambda x: x * np.exp(-x * x), 0.0, math.inf, 0.5),
    (lambda x: 1 / (1 + x) ** 2, 0.0, math.inf, 1.0),
    (lambda x: np.sin(x) ** 2, 0.0, 10 * math.pi, 5 * math.pi),
    (lambda x: np.exp(-100 * (x - 0.5) ** 2), 0.0, 1.0, math.sqrt(math.pi / 100) * math.erf(5.0)),
    (lambda x: np.exp(1j * x), 0.0, math.pi, 2j),
    (lambda x: np.cosh(x), -1.0, 1.0, 2 * math.sinh(1.0)),
]


@pytest.mark.parametrize("case", range(len(LIBRARY)))
def test_reported_error_bounds_hold(case):
    f, a, b, exact = LIBRARY[case]
    tol = 1e-10
    res = nm.integrate_adaptive(f, a, b, tol=tol)
    assert res.abs_error_estimate >= 0
    assert res.evaluations > 0
    assert abs(res.value - exact) <= max(tol, res.abs_error_estimate)


def test_simple_examples():
    assert nm.integrate_adaptive(lambda x: x**2, 0, 1).value == pytest.approx(1 / 3, abs=1e-12)
    assert nm.integrate_adaptive(lambda t: np.exp(-t), 0, math.inf).value == pytest.approx(1.0, abs=1e-10)


def test_unitarity_with_adaptive_quadrature(three_terms):
    res = nm.integrate_adaptive(lambda x: pk.density(x, 37.0, three_terms), -math.inf, math.inf, tol=1e-11)
    assert res.value == pytest.approx(1.0, abs=1e-8)


def test_relative_tolerance():
    res = nm.integrate_adaptive(lambda x: 1e20 * np.exp(-x), 0, 5, tol=1e-300, rtol=1e-12)
    assert res.value == pytest.approx(1e20 * (1 - math.exp(-5)), rel=1e-12)


def test_non_convergence_carries_worst_panel():
    with pytest.raises(NonConvergenceError) as info:
        nm.integrate_adaptive(lambda x: np.sign(x - 0.3141) * 1e3, 0.0, 1.0, tol=1e-15, max_depth=8)
    lo, hi, err = info.value.worst_panel
    assert lo <= 0.3141 <= hi and err > 0


def test_bad_bounds():
    with pytest.raises(DomainError):
        nm.integrate_adaptive(np.sin, 1.0, 0.0)
    assert nm.integrate_adaptive(np.sin, 1.0, 1.0).value == 0.0


def test_integrate_panels_sums_pieces():
    res = nm.integrate_panels(lambda x: np.abs(x), [-1.0, 0.0, 2.0])
    assert res.value == pytest.approx(2.5, abs=1e-13)


# -- damped oscillatory -----------------------------------------------------

def closed_form(a, b, c=0.0):
    """∫_0^∞ √p exp(-a p² + b p + c) dp via the parabolic cylinder function D_{-3/2}."""
    mpmath.mp.dps = 30
    a, b, c = mpmath.mpc(a), mpmath.mpc(b), mpmath.mpc(c)
    z = -b / mpmath.sqrt(2 * a)
    value = ((2 * a) ** mpmath.mpf(-0.75) * mpmath.gamma(1.5)
             * mpmath.exp(b * b / (8 * a) + c) * mpmath.pcfd(-1.5, z))
    return complex(value)


def brute_force(a, b, c=0.0, u_max=None, n=400_001):
    """Dense trapezoid sum after p = u², which removes the √p endpoint singularity."""
    if u_max is None:
        u_max = (60.0 / a.real) ** 0.25 + math.sqrt(abs(b) / a.real + 1.0)
    u = np.linspace(0.0, u_max, n)
    f = 2 * u * u * np.exp(-a * u**4 + b * u * u + c)
    return complex(trapezoid(f, u))


def test_pure_fourier_case_t0():
    s, p0 = 1.0, 0.9
    for L in (0.0, 2.0, 15.0):
        a, b, c = s * s + 0j, 2 * s * s * p0 + 1j * L, -s * s * p0 * p0
        got = nm.integrate_damped_oscillatory(a, b, c).value
        ref = closed_form(a, b, c)
        assert abs(got - ref) <= 1e-10 * max(abs(ref), 1e-300)
        assert abs(got - brute_force(a, b, c)) <= 1e-8 * max(abs(ref), 1e-12)


def test_symmetric_detector_case():
    a, b = 1.0 + 0.5j * 3.0, 2.0 + 0j  # x_d = x0: b is real
    got = nm.integrate_damped_oscillatory(a, b).value
    mirrored = nm.integrate_damped_oscillatory(a.conjugate(), b.conjugate()).value
    assert got == pytest.approx(mirrored.conjugate(), rel=1e-12)
    ref = brute_force(a, b)
    assert got.real == pytest.approx(ref.real, rel=1e-8)
    assert got.imag == pytest.approx(ref.imag, rel=1e-8)


def test_late_time_tail_matches_closed_form():
    """Momentum support far from the stationary point p* = L/t."""
    s, p0, L = 1.0, 2.0, 10.0
    for t in (50.0, 500.0, 5e4, 1e7):
        a, b, c = s * s + 0.5j * t, 2 * s * s * p0 + 1j * L, -s * s * p0 * p0
        got = nm.integrate_damped_oscillatory(a, b, c).value
        ref = closed_form(a, b, c)
        assert abs(got - ref) <= 1e-9 * abs(ref)


@settings(max_examples=60, deadline=None)
@given(
    st.floats(0.3, 3.0),     # s
    st.floats(-8.0, 8.0),    # p0
    st.floats(-1e4, 1e4),    # x_d - x0
    st.floats(-6.0, 8.0),    # log10 |t|
    st.booleans(),
)
def test_damped_oscillatory_matches_mpmath(s, p0, L, log_t, negative):
    t = (-1 if negative else 1) * 10.0**log_t
    a, b, c = s * s + 0.5j * t, 2 * s * s * p0 + 1j * L, -s * s * p0 * p0
    ref = closed_form(a, b, c)
    if abs(ref) < 1e-280:
        return
    got = nm.integrate_damped_oscillatory(a, b, c).value
    assert abs(got - ref) <= 1e-9 * abs(ref)


def test_damped_oscillatory_needs_decay():
    with pytest.raises(DomainError):
        nm.integrate_damped_oscillatory(0.5j, 1.0)


# -- spectral propagator ----------------------------------------------------

def grid_for(spec, t_max):
    x_min, x_max, n = nm.suggest_grid(spec.centers, spec.widths, spec.momenta, t_max)
    return nm.sample_grid(lambda x: pk.psi(x, 0.0, spec), x_min, x_max, n)


def test_t0_is_identity(superposition):
    g = grid_for(superposition, 5.0)
    np.testing.assert_array_equal(nm.propagate_spectral(g, 0.0).amplitudes, g.amplitudes)


def test_tiny_step_is_near_identity(superposition):
    g = grid_for(superposition, 5.0)
    h = nm.propagate_spectral(g, 1e-14)
    assert np.abs(h.amplitudes - g.amplitudes).max() < 1e-12


def test_matches_closed_form_at_t10():
    spec = pk.gaussian(-3.0, 1.2, 0.9)
    g = nm.propagate_spectral(grid_for(spec, 10.0), 10.0)
    rho = np.abs(g.amplitudes) ** 2
    ref = pk.density(g.x, 10.0, spec)
    interior = ref > 1e-3 * ref.max()
    assert np.max(np.abs(rho - ref)[interior] / ref[interior]) <= 1e-8


def test_group_property(three_terms):
    g = grid_for(three_terms, 12.0)
    two = nm.propagate_spectral(nm.propagate_spectral(g, 4.5), 7.5)
    one = nm.propagate_spectral(g, 12.0)
    assert np.abs(two.amplitudes - one.amplitudes).max() <= 1e-10


def test_norm_conservation(three_terms):
    g = grid_for(three_terms, 30.0)
    for t in (1.0, 10.0, 30.0, -30.0):
        assert nm.propagate_spectral(g, t).norm() == pytest.approx(g.norm(), abs=1e-12)


def test_wraparound_raises():
    spec = pk.gaussian(0.0, 3.0)
    g = grid_for(spec, 1.0)
    with pytest.raises(AliasingError, match="wider grid"):
        nm.propagate_spectral(g, 200.0)


def test_grid_invariants():
    with pytest.raises(DomainError):
        nm.GridState(0.0, 1.0, 100, np.zeros(100, complex))
    with pytest.raises(DomainError):
        nm.GridState(0.0, 1.0, 64, np.zeros(32, complex))
    big = nm.GridState(-10, 10, 64, np.full(64, 2.0 + 0j))
    with pytest.raises(DomainError):
        nm.propagate_spectral(big, 1.0)


def test_numerics_does_not_import_packet():
    source = Path(nm.__file__).read_text()
    imported = set()
    for node in ast.walk(ast.parse(source)):
        if isinstance(node, ast.ImportFrom):
            imported.update(alias.name for alias in node.names)
            imported.add(node.module or "")
        elif isinstance(node, ast.Import):
            imported.update(alias.name for alias in node.names)
    assert not any("packet" in name or "distributions" in name for name in imported)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_oracle_equivalence_property(seed):
    rng = np.random.default_rng(seed)
    terms = [pk.GaussianTerm(complex(*rng.normal(size=2)), rng.uniform(-5, 5),
                             rng.uniform(0.5, 2.0), rng.uniform(-3, 3))
             for _ in range(rng.integers(1, 4))]
    spec = pk.PacketSpec.normalized(terms)
    t = float(rng.uniform(0.1, 20.0))
    g = nm.propagate_spectral(grid_for(spec, t), t)
    ref = pk.density(g.x, t, spec)
    assert np.abs(np.abs(g.amplitudes) ** 2 - ref).max() <= 1e-10 * ref.max()

import math

import numpy as np
import pytest

from toa_lab import asymptotics as asy
from toa_lab import distributions as dist
from toa_lab import packet as pk
from toa_lab.errors import DomainError
from toa_lab.units import make_unit_system, momentum_from_velocity

T_LOG = np.logspace(0, 12, 49)

GAUSSIAN_FAMILY = [
    pk.gaussian(-3.0, 0.5),
    pk.gaussian(0.0, 0.0),
    pk.gaussian(-5.0, 1.0, 1.5),
    pk.gaussian(2.0, -0.7, 0.8),
]


def fig1_packet():
    us = make_unit_system(6.655e-26, 30e-9)
    return pk.gaussian(us.to_dimensionless(-1e-3, "length"), momentum_from_velocity(0.05, us))


def fitted(spec, detector, T=T_LOG):
    sweep = asy.qc_denominator_sweep(spec, detector, T)
    onset = asy.asymptotic_onset(sweep)
    assert onset is not None
    return sweep, asy.fit_log(sweep, (max(onset, 1e3), T[-1]))


def test_synthetic_log_fit_recovery():
    T = np.logspace(0, 6, 25)
    fit = asy.fit_log(asy.WindowSweep(T, 3 * np.log(T) + 1))
    assert fit.slope == pytest.approx(3.0, abs=1e-10)
    assert fit.intercept == pytest.approx(1.0, abs=1e-9)
    assert fit.residual_rms < 1e-12
    assert fit(np.e) == pytest.approx(4.0)


def test_fit_needs_four_points():
    T = np.logspace(0, 1, 3)
    with pytest.raises(DomainError):
        asy.fit_log(asy.WindowSweep(T, np.log(T)))


def test_sweep_requires_increasing_T():
    with pytest.raises(DomainError):
        asy.WindowSweep(np.array([1.0, 1.0, 2.0]), np.zeros(3))


def test_onset_detection_on_synthetic_transient():
    T = np.logspace(0, 8, 81)
    sweep = asy.WindowSweep(T, 2 * np.log(T) + 50 / T)
    onset = asy.asymptotic_onset(sweep)
    assert onset is not None and 1e2 < onset < 1e5
    assert asy.local_slopes(sweep)[-1] == pytest.approx(2.0, rel=1e-6)


@pytest.mark.parametrize("index", range(len(GAUSSIAN_FAMILY)))
@pytest.mark.parametrize("detector", [pk.Point(0.0), pk.centered_interval(1.0), pk.centered_interval(2.5, 1.0)])
def test_slope_matches_closed_form(index, detector):
    spec = GAUSSIAN_FAMILY[index]
    _, fit = fitted(spec, detector)
    assert fit.slope == pytest.approx(asy.predicted_slope(spec, detector), rel=0.05)


def test_slope_for_superposition(superposition):
    for detector in (pk.Point(0.0), pk.centered_interval(1.0)):
        _, fit = fitted(superposition, detector)
        assert fit.slope == pytest.approx(asy.predicted_slope(superposition, detector), rel=0.05)


def test_predicted_slope_counts_both_half_windows():
    spec = pk.gaussian(-3.0, 0.5)
    phi0 = pk.zero_momentum_density(spec)
    assert asy.predicted_slope(spec, pk.Point(1.0)) == pytest.approx(2 * phi0)
    assert asy.predicted_slope(spec, pk.centered_interval(0.4)) == pytest.approx(0.8 * phi0)


def test_one_sided_tail_gives_half_the_slope():
    """Only the t > 0 half of the window: the tail alone contributes |φ(0)|² per ln T."""
    spec = pk.gaussian(-3.0, 0.5)
    T = np.logspace(4, 12, 17)
    knee = dist.characteristic_time(spec, pk.Point(0.0))
    rho = lambda t: pk.density(0.0, t, spec)
    N = np.array([dist.integrate_time(rho, 0.0, T_i / 2, knee) for T_i in T])
    slope = np.polyfit(np.log(T), N, 1)[0]
    assert slope == pytest.approx(pk.zero_momentum_density(spec), rel=1e-3)


def test_odd_pair_denominator_is_bounded():
    spec = pk.odd_pair(3.0)
    for detector in (pk.centered_interval(1.0), pk.Point(1.0)):
        sweep = asy.qc_denominator_sweep(spec, detector, T_LOG)
        assert asy.is_bounded(sweep)
        N = sweep.qc_denominator
        assert N.max() <= 1.01 * N[-1]
        assert N[-1] > 0


def test_fig1_denominator_increasing_and_concave():
    spec = fig1_packet()
    T = np.logspace(5, 14, 37)
    N = asy.qc_denominator_sweep(spec, pk.Point(0.0), T).qc_denominator
    assert np.all(np.diff(N) > 0)
    late = T > 1e7
    secant = np.diff(N[late]) / np.diff(T[late])
    assert np.all(np.diff(secant) < 0)
    _, fit = fitted(spec, pk.Point(0.0), T)
    assert fit.slope == pytest.approx(asy.predicted_slope(spec, pk.Point(0.0)), rel=0.05)


def test_vanishing_on_fig1_packet():
    spec = fig1_packet()
    t_probe = 35214.0
    T = np.array([1e5, 1e6, 1e8, 1e10, 1e13])
    values = asy.verify_vanishing(spec, pk.Point(0.0), t_probe, T)
    assert np.all(np.diff(values) < 0)
    assert asy.vanishing_bound_holds(values, T)


def test_vanishing_stops_without_zero_momentum():
    spec = pk.odd_pair(3.0)
    D = pk.centered_interval(1.0)
    values = asy.verify_vanishing(spec, D, 1.0, T_LOG[T_LOG >= 10])
    assert np.all(np.diff(values) <= 0)
    assert values[-1] > 0
    assert values[-1] == pytest.approx(values[-5], rel=1e-3)


def test_doubling_T_in_log_regime():
    spec = pk.gaussian(-3.0, 0.5)
    sweep, fit = fitted(spec, pk.Point(0.0))
    T = 1e11
    values = asy.verify_vanishing(spec, pk.Point(0.0), 1.0, [T, 2 * T])
    assert values[1] / values[0] == pytest.approx(fit(T) / fit(2 * T), rel=1e-6)
    assert values[1] / values[0] == pytest.approx(math.log(T) / math.log(2 * T), rel=0.01)


def test_verify_vanishing_requires_probe_inside():
    with pytest.raises(DomainError):
        asy.verify_vanishing(pk.gaussian(0, 1), pk.Point(0.0), 10.0, [5.0, 100.0])


def test_nonarrival_bound_in_fitted_regime():
    spec = pk.gaussian(-3.0, 0.5)
    D = pk.centered_interval(1.0)
    sweep, fit = fitted(spec, D)
    in_fit = sweep.T >= fit.fit_range[0]
    bound = asy.nonarrival_lower_bound(fit, sweep.T[in_fit])
    assert np.all(sweep.p_na_qc[in_fit] >= bound)
    assert sweep.p_na_qc[-1] > 0.999


def test_sweep_with_kfsc_columns():
    spec = pk.gaussian(-10.0, 7.0)
    T = np.array([0.5, 1.0, 2.0, 5.0, 50.0])
    sweep = asy.qc_denominator_sweep(spec, pk.centered_interval(1.0), T, kfsc=True)
    assert set(sweep.p_na_kfsc) == set(dist.KFSC)
    for p in sweep.p_na_kfsc.values():
        assert np.all(np.diff(p) <= 1e-12)
    assert np.all((sweep.p_na_qc >= -1e-12) & (sweep.p_na_qc <= 1 + 1e-12))

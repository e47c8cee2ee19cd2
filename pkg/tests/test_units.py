import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from toa_lab.errors import DomainError
from toa_lab.units import HBAR_SI, UnitSystem, make_unit_system, momentum_from_velocity

# Frozen from a 30-digit mpmath evaluation of m σ0²/ħ etc. for the Ca+ setup.
CA_TIME_UNIT = 5.67955629331975595551e-7
CA_VELOCITY_UNIT = 0.0528210276483846731781
CA_P0 = 0.946592715553292659252
CA_TRANSIT = 35214.0184322564487854


@pytest.fixture
def ca():
    return make_unit_system(6.655e-26, 30e-9)


def test_ca_unit_factors(ca):
    assert ca.time_unit_si == pytest.approx(CA_TIME_UNIT, rel=1e-13)
    assert ca.velocity_unit_si == pytest.approx(CA_VELOCITY_UNIT, rel=1e-13)
    assert ca.length_unit_si == 30e-9
    assert ca.momentum_unit_si == pytest.approx(HBAR_SI / 30e-9, rel=1e-15)


def test_velocity_to_momentum(ca):
    assert momentum_from_velocity(0.05, ca) == pytest.approx(CA_P0, rel=1e-13)
    assert momentum_from_velocity(0.0, ca) == 0.0
    assert momentum_from_velocity(ca.velocity_unit_si, ca) == pytest.approx(1.0, rel=1e-15)


def test_identity_scaling():
    us = UnitSystem(1.0, 1.0)
    # ħ is fixed, so m = σ0 = 1 in SI only gives unit factors in ħ = 1 units.
    assert us.time_unit_si == pytest.approx(1 / HBAR_SI)
    assert us.length_unit_si == 1.0
    assert us.to_dimensionless(3.0, "mass") == 3.0


def test_classical_transit_time_round_trip(ca):
    t = ca.to_dimensionless(0.02, "time")
    assert t == pytest.approx(CA_TRANSIT, rel=1e-13)
    assert ca.to_si(t, "time") == pytest.approx(0.02, rel=1e-12)
    distance = ca.to_dimensionless(1e-3, "length")
    assert distance / momentum_from_velocity(0.05, ca) == pytest.approx(CA_TRANSIT, rel=1e-12)


@pytest.mark.parametrize("mass, sigma", [(0.0, 1e-9), (-1.0, 1e-9), (1e-26, 0.0), (math.nan, 1.0), (1.0, math.inf)])
def test_rejects_non_positive(mass, sigma):
    with pytest.raises(DomainError):
        make_unit_system(mass, sigma)


def test_unknown_dimension(ca):
    with pytest.raises(DomainError):
        ca.unit("temperature")


@given(
    st.floats(1e-30, 1e-20),
    st.floats(1e-10, 1e-5),
    st.floats(-1e3, 1e3, allow_nan=False),
    st.sampled_from(["length", "time", "momentum", "velocity", "mass"]),
)
def test_round_trip_property(mass, sigma, value, dimension):
    us = UnitSystem(mass, sigma)
    back = us.to_si(us.to_dimensionless(value, dimension), dimension)
    assert back == pytest.approx(value, rel=1e-12, abs=1e-300)


@given(st.floats(1e-30, 1e-20), st.floats(1e-10, 1e-5))
def test_transit_time_invariant_property(mass, sigma):
    us = UnitSystem(mass, sigma)
    t = us.to_dimensionless(0.02, "time")
    assert us.to_si(t, "time") == pytest.approx(0.02, rel=1e-12)
    # distance / velocity is the same in either unit system
    d = us.to_dimensionless(1e-3, "length")
    v = us.to_dimensionless(0.05, "velocity")
    assert d / v == pytest.approx(t, rel=1e-12)

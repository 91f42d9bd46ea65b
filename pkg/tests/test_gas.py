import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from barenblatt_euler.gas import (DampingLaw, DomainError, FieldState, GasLaw, Grid,
                                  check_pressure_gap, pressure, riemann_invariants,
                                  sound_speed, state_from_invariants, velocity)

gammas = st.floats(1.01, 2.99)
densities = st.floats(0.0, 2.0)


def test_derived_constants():
    gas = GasLaw(2.0)
    assert gas.kappa == 0.125
    assert gas.theta == 0.5
    assert gas.l_exp == 0.5


@pytest.mark.parametrize("gamma", [1.0, 3.0, 0.5, 3.5])
def test_gamma_outside_range_rejected(gamma):
    with pytest.raises(DomainError):
        GasLaw(gamma)


@pytest.mark.parametrize("lam", [0.0, 1.0, -0.1])
def test_lambda_outside_range_rejected(lam):
    with pytest.raises(DomainError):
        DampingLaw(lam)


def test_pressure_values():
    assert pressure(GasLaw(2.0), 1.0) == 0.125
    assert pressure(GasLaw(2.0), 0.0) == 0.0
    assert pressure(GasLaw(1.5), 2.0) == pytest.approx(2 ** 1.5 / 24, rel=1e-14)
    assert pressure(GasLaw(1.5), 2.0) == pytest.approx(0.1178511, abs=1e-7)


def test_sound_speed_values():
    assert sound_speed(GasLaw(2.0), 1.0) == 0.5
    assert sound_speed(GasLaw(1.7), 0.0) == 0.0
    assert sound_speed(GasLaw(1.5), 4.0) == pytest.approx(0.3535534, abs=1e-7)


def test_negative_density_rejected():
    with pytest.raises(DomainError):
        pressure(GasLaw(2.0), -1.0)
    with pytest.raises(DomainError):
        sound_speed(GasLaw(2.0), np.array([1.0, -1e-3]))
    with pytest.raises(DomainError):
        riemann_invariants(GasLaw(2.0), -1.0, 0.0)


def test_riemann_invariant_values():
    assert riemann_invariants(GasLaw(2.0), 1.0, 0.0) == (1.0, -1.0)
    assert riemann_invariants(GasLaw(1.4), 0.0, 0.7) == (0.7, 0.7)
    assert riemann_invariants(GasLaw(2.0), 4.0, 1.0) == (3.0, -1.0)


@given(gammas, st.floats(1e-6, 5.0), st.floats(-5.0, 5.0))
def test_riemann_invariants_round_trip(gamma, rho, u):
    gas = GasLaw(gamma)
    w, z = riemann_invariants(gas, rho, u)
    assert w - z == pytest.approx(2 * rho ** gas.theta, rel=1e-12)
    assert w >= z
    r2, u2 = state_from_invariants(gas, w, z)
    assert r2 == pytest.approx(rho, rel=1e-10)
    assert u2 == pytest.approx(u, rel=1e-12, abs=1e-12 * (abs(u) + rho ** gas.theta))


@given(gammas, st.floats(1e-8, 10.0))
def test_sound_speed_squared_is_gamma_p_over_rho(gamma, rho):
    gas = GasLaw(gamma)
    assert sound_speed(gas, rho) ** 2 == pytest.approx(gamma * pressure(gas, rho) / rho, rel=1e-12)


def test_velocity_is_zero_on_dry_cells():
    u = velocity(np.array([1.0, 1e-14, 0.0]), np.array([2.0, 1e-14, 0.0]))
    assert list(u) == [2.0, 0.0, 0.0]


def test_pressure_gap_examples():
    gas = GasLaw(2.0)
    same = check_pressure_gap(gas, 0.7, 0.7)
    assert (same.monotone_gap, same.power_gap, same.weighted_gap) == (0.0, 0.0, 0.0)
    assert same.holds
    vac = check_pressure_gap(gas, 1.0, 0.0)
    assert (vac.monotone_gap, vac.power_gap, vac.weighted_gap) == (1.0, 1.0, 1.0)
    assert vac.holds
    mid = check_pressure_gap(gas, 1.0, 0.5)
    assert mid.monotone_gap == pytest.approx(0.375, rel=1e-15)
    assert mid.power_gap == pytest.approx(0.125, rel=1e-15)
    assert mid.weighted_gap == pytest.approx(0.375, rel=1e-15)
    assert mid.holds


def test_pressure_gap_matches_brute_force():
    rng = np.random.default_rng(3)
    rho, rb = rng.uniform(0, 2, (2, 500))
    rep = check_pressure_gap(GasLaw(2.0), rho, rb)
    for i in range(0, 500, 37):
        a, b = float(rho[i]), float(rb[i])
        assert rep.monotone_gap[i] == pytest.approx((a * a - b * b) * (a - b), rel=1e-12, abs=1e-15)
        assert rep.power_gap[i] == pytest.approx(abs(a - b) ** 3, rel=1e-12, abs=1e-15)
        assert rep.weighted_gap[i] == pytest.approx((a + b) * (a - b) ** 2, rel=1e-12, abs=1e-15)


def test_pressure_gap_bounds_enforced():
    with pytest.raises(DomainError):
        check_pressure_gap(GasLaw(2.0), 2.5, 1.0, bound=2.0)
    with pytest.raises(DomainError):
        check_pressure_gap(GasLaw(2.0), 1.0, -0.1)


@given(gammas, densities, densities)
def test_monotone_gap_dominates_power_gap(gamma, rho, rb):
    rep = check_pressure_gap(GasLaw(gamma), rho, rb)
    assert rep.monotone_gap >= rep.power_gap
    assert rep.holds
    assert rep.bregman_gap >= -1e-15 * max(1.0, rho ** (gamma + 1))


def test_gap_ratios_are_bounded():
    rng = np.random.default_rng(0)
    rho, rb = rng.uniform(0, 2, (2, 2000))
    breg, mono = check_pressure_gap(GasLaw(1.6), rho, rb).ratios()
    assert np.all(np.isfinite(breg)) and np.all(breg > 0)
    assert np.all(mono > 0)


def test_grid_geometry():
    grid = Grid.symmetric(2.0, 4)
    assert grid.dx == 1.0
    np.testing.assert_array_equal(grid.centers(), [-1.5, -0.5, 0.5, 1.5])
    assert grid.x_right == 2.0
    with pytest.raises(DomainError):
        Grid(0.0, 0.0, 4)
    with pytest.raises(DomainError):
        Grid(0.0, 1.0, 1)


def test_field_state_invariants():
    FieldState(0.0, np.array([0.0, 1.0]), np.array([0.0, 2.0]))
    with pytest.raises(DomainError):
        FieldState(0.0, np.array([0.0, 1.0]), np.array([1.0, 2.0]))
    with pytest.raises(DomainError):
        FieldState(0.0, np.array([-1.0, 1.0]), np.array([0.0, 0.0]))
    with pytest.raises(DomainError):
        FieldState(0.0, np.array([1.0]), np.array([0.0, 0.0]))
    with pytest.raises(DomainError):
        FieldState(-1.0, np.array([1.0]), np.array([0.0]))


def test_damping_coefficient():
    assert DampingLaw(0.5).coefficient(3.0) == pytest.approx(0.5)
    assert math.isclose(DampingLaw(0.2).coefficient(0.0), 1.0)

from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, optimize

from barenblatt_euler.barenblatt import (kernel_integral, mass_of, profile_from_mass, sample,
                                         shape_constant, similarity_exponent)
from barenblatt_euler.gas import DampingLaw, DomainError, GasLaw, Grid


def quad_mass(gas, A, B):
    """Mass of (A - B x^2)_+^(1/(gamma-1)) by adaptive quadrature."""
    R = np.sqrt(A / B)
    k = 1.0 / (gas.gamma - 1.0)
    val, _ = integrate.quad(lambda x: max(A - B * x * x, 0.0) ** k, -R, R,
                            epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def bisection_amplitude(gas, damping, M):
    B = shape_constant(gas, damping)
    return optimize.brentq(lambda A: quad_mass(gas, A, B) - M, 1e-6, 50.0, xtol=1e-15, rtol=1e-14)


@pytest.fixture
def canonical():
    return profile_from_mass(GasLaw(2.0), DampingLaw(0.5), 1.0)


def test_shape_constant_values():
    assert shape_constant(GasLaw(2.0), DampingLaw(0.5)) == pytest.approx(1.0, rel=1e-15)
    assert shape_constant(GasLaw(2.0), SimpleNamespace(lam=0.0)) == pytest.approx(2 / 3, rel=1e-15)


@pytest.mark.parametrize("gamma", [1.2, 1.5, 2.0, 2.5, 2.9])
def test_zero_damping_exponent_reduces_to_classical_constants(gamma):
    gas, still = GasLaw(gamma), SimpleNamespace(lam=0.0)
    assert shape_constant(gas, still) == pytest.approx(2.0 / (gamma ** 2 - 1.0), rel=1e-14)
    assert similarity_exponent(gas, still) == pytest.approx(1.0 / (gamma + 1.0), rel=1e-15)


@pytest.mark.parametrize("gamma", [1.2, 1.5, 2.0, 2.5, 2.9])
@pytest.mark.parametrize("lam", [0.2, 0.5, 0.8])
def test_amplitude_matches_bisection_oracle(gamma, lam):
    gas, damping = GasLaw(gamma), DampingLaw(lam)
    prof = profile_from_mass(gas, damping, 1.0)
    assert prof.A == pytest.approx(bisection_amplitude(gas, damping, 1.0), rel=1e-10)
    assert abs(mass_of(gas, prof.A, prof.B) - 1.0) <= 1e-10


def test_canonical_values(canonical):
    assert canonical.A == pytest.approx(0.8254818, abs=1e-7)
    assert canonical.A ** 1.5 == pytest.approx(0.75, rel=1e-13)
    assert canonical.density(0.0, 0.0) == pytest.approx(canonical.A, rel=1e-15)
    assert canonical.density(0.5, 0.0) == pytest.approx(0.5754818, abs=1e-7)
    assert canonical.momentum(0.5, 0.0) == pytest.approx(0.1438705, abs=1e-7)
    assert canonical.support_radius(0.0) == pytest.approx(0.9085603, abs=1e-7)
    assert canonical.support_radius(3.0) == pytest.approx(1.8171206, abs=1e-7)
    assert canonical.lp_norm(np.inf, 0.0) == pytest.approx(canonical.A, rel=1e-15)


def test_kernel_integral_against_quad():
    for power in (0.5, 1.0, 1.5, 2.0 / 3.0, 5.0):
        ref, _ = integrate.quad(lambda y: (1 - y * y) ** power, 0, 1, epsabs=0, epsrel=1e-13)
        assert kernel_integral(power) == pytest.approx(ref, rel=1e-11)
    assert kernel_integral(1.0) == pytest.approx(2.0 / 3.0, rel=1e-15)


def test_nonpositive_mass_rejected():
    with pytest.raises(DomainError):
        profile_from_mass(GasLaw(2.0), DampingLaw(0.5), 0.0)


def test_support_edges(canonical):
    for t in (0.0, 1.0, 7.5):
        R = canonical.support_radius(t)
        assert canonical.density(R, t) == 0.0
        assert canonical.density(-R * 1.01, t) == 0.0
        assert canonical.momentum(R * 1.5, t) == 0.0
        assert canonical.momentum(0.0, t) == 0.0


@pytest.mark.parametrize("gamma", [1.5, 2.0, 2.5])
def test_momentum_is_darcy_law(gamma):
    prof = profile_from_mass(GasLaw(gamma), DampingLaw(0.5), 1.0)
    kappa = prof.gas.kappa
    t = 0.7
    x = np.linspace(-0.8, 0.8, 17) * prof.support_radius(t)
    errs = []
    for h in (1e-3, 5e-4):
        p = lambda y: prof.density(y, t) ** gamma
        darcy = -kappa * (1 + t) ** 0.5 * (p(x + h) - p(x - h)) / (2 * h)
        errs.append(np.max(np.abs(darcy - prof.momentum(x, t))))
    assert errs[0] < 1e-5
    assert errs[1] < errs[0] / 3.5


@pytest.mark.parametrize("gamma", [1.5, 2.0, 2.5])
@pytest.mark.parametrize("lam", [0.2, 0.5, 0.8])
def test_mass_by_quadrature_at_several_times(gamma, lam):
    prof = profile_from_mass(GasLaw(gamma), DampingLaw(lam), 1.0)
    for t in (0.0, 1.0, 10.0, 100.0):
        R = prof.support_radius(t)
        val, _ = integrate.quad(lambda x: prof.density(x, t), -R, R, epsabs=0, epsrel=1e-13,
                                limit=200)
        assert abs(val - 1.0) <= 1e-10


def test_continuity_equation_second_order():
    prof = profile_from_mass(GasLaw(2.0), DampingLaw(0.8), 1.0)
    t = 2.0
    x = np.linspace(-0.6, 0.6, 31) * prof.support_radius(t)

    def residual(h):
        rt = (prof.density(x, t + h) - prof.density(x, t - h)) / (2 * h)
        mx = (prof.momentum(x + h, t) - prof.momentum(x - h, t)) / (2 * h)
        return np.max(np.abs(rt + mx))

    r = [residual(h) for h in (0.04, 0.02, 0.01)]
    orders = np.log2(np.array(r[:-1]) / np.array(r[1:]))
    assert np.all(orders > 1.9)


@given(st.floats(1.05, 2.95), st.floats(0.05, 0.95), st.floats(0.1, 10.0),
       st.floats(0.0, 50.0), st.floats(-3.0, 3.0))
@settings(max_examples=60)
def test_parity(gamma, lam, M, t, x):
    prof = profile_from_mass(GasLaw(gamma), DampingLaw(lam), M)
    assert prof.density(x, t) == prof.density(-x, t)
    assert prof.momentum(x, t) == -prof.momentum(-x, t)
    assert 0 < prof.s < 1


@pytest.mark.parametrize("p", [1.0, 2.0, 3.0, 4.5])
def test_lp_norm_against_quadrature(p):
    prof = profile_from_mass(GasLaw(2.5), DampingLaw(0.3), 2.0)
    for t in (0.0, 5.0):
        R = prof.support_radius(t)
        val, _ = integrate.quad(lambda x: prof.density(x, t) ** p, -R, R, epsabs=0,
                                epsrel=1e-12, limit=200)
        assert prof.lp_norm(p, t) == pytest.approx(val ** (1 / p), rel=1e-9)


def test_lp_norm_time_scaling():
    prof = profile_from_mass(GasLaw(1.7), DampingLaw(0.6), 1.3)
    assert prof.lp_norm(1.0, 12.0) == pytest.approx(1.3, rel=1e-12)
    for p in (1.5, 2.7, np.inf):
        expo = prof.s if p == np.inf else prof.s * (p - 1) / p
        assert prof.lp_norm(p, 9.0) / prof.lp_norm(p, 0.0) == pytest.approx(10.0 ** -expo, rel=1e-13)
    with pytest.raises(DomainError):
        prof.lp_norm(0.5, 1.0)


def test_cell_averages_are_exact(canonical):
    grid = Grid.symmetric(1.5, 37)
    t = 0.4
    avg = canonical.cell_averages(grid, t)
    faces = grid.faces()
    for i in (0, 5, 12, 18, 25):
        ref, _ = integrate.quad(lambda x: canonical.density(x, t), faces[i], faces[i + 1],
                                epsabs=1e-15, epsrel=1e-12)
        assert avg[i] == pytest.approx(ref / grid.dx, rel=1e-9, abs=1e-14)
    assert np.sum(avg) * grid.dx == pytest.approx(1.0, rel=1e-13)
    assert canonical.cumulative_mass(10.0, t) == pytest.approx(1.0, rel=1e-15)


def test_sample_covers_support(canonical):
    x, rho, mom = sample(canonical, 1.0, 11)
    assert x[0] < -canonical.support_radius(1.0) and x[-1] > canonical.support_radius(1.0)
    assert rho[0] == rho[-1] == 0.0
    np.testing.assert_allclose(mom, canonical.momentum(x, 1.0))

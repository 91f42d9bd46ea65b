import numpy as np
import pytest
from hypothesis import given, strategies as st

from barenblatt_euler.barenblatt import profile_from_mass
from barenblatt_euler.gas import DampingLaw, GasLaw, Grid
from barenblatt_euler.pme import (PmeRun, StabilityError, evolve, max_stable_step,
                                  physical_time, pme_step, rescale_time, run_snapshots)

GAS, DAMP = GasLaw(2.0), DampingLaw(0.5)


def test_rescale_time_values():
    assert rescale_time(DAMP, 0.0) == 0.0
    assert rescale_time(DAMP, 3.0) == pytest.approx(7.0 / 1.5, rel=1e-15)


@given(st.floats(0.01, 0.99), st.floats(0.0, 1e4))
def test_time_maps_are_inverse(lam, t):
    d = DampingLaw(lam)
    assert physical_time(d, rescale_time(d, t)) == pytest.approx(t, rel=1e-12, abs=1e-12)


def test_constant_state_is_steady():
    grid = Grid.symmetric(1.0, 50)
    run = PmeRun(GAS, DAMP, grid, np.full(50, 0.7), 0.0)
    out = pme_step(run, 0.5 * max_stable_step(run))
    np.testing.assert_array_equal(out.rho, run.rho)


def test_step_above_stability_bound_rejected():
    grid = Grid.symmetric(1.0, 50)
    run = PmeRun(GAS, DAMP, grid, np.full(50, 0.7), 0.0)
    with pytest.raises(StabilityError):
        pme_step(run, 1.01 * max_stable_step(run))


def test_spike_conserves_mass_and_spreads():
    grid = Grid.symmetric(1.0, 101)
    rho = np.zeros(101)
    rho[50] = 1.0 / grid.dx
    run = PmeRun(GAS, DAMP, grid, rho, 0.0)
    support = [1]
    for _ in range(300):
        run = pme_step(run, 0.9 * max_stable_step(run))
        assert abs(run.mass - 1.0) <= 1e-12
        assert run.rho.min() >= 0.0
        support.append(int(np.count_nonzero(run.rho)))
    assert all(a <= b for a, b in zip(support, support[1:]))
    assert support[-1] > 5


def test_barenblatt_convergence_order():
    prof = profile_from_mass(GAS, DAMP, 1.0)
    half = 1.5 * prof.support_radius(1.0)
    errors = []
    for n in (100, 200, 400):
        grid = Grid.symmetric(half, n)
        out = evolve(PmeRun(GAS, DAMP, grid, prof.cell_averages(grid, 0.0), 0.0), 1.0)
        assert out.t == 1.0
        errors.append(np.sum(np.abs(out.rho - prof.cell_averages(grid, 1.0))) * grid.dx)
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert np.all(orders >= 1.0)


def test_self_similar_collapse():
    prof = profile_from_mass(GasLaw(1.5), DAMP, 1.0)
    grid = Grid.symmetric(1.5 * prof.support_radius(3.0), 400)
    start = PmeRun(prof.gas, DAMP, grid, prof.cell_averages(grid, 0.0), 0.0)
    snaps = run_snapshots(start, [1.0, 3.0])
    x = grid.centers()
    for snap in snaps:
        scale = (1 + snap.t) ** prof.s
        xi = x / scale
        f = np.maximum(prof.A - prof.B * xi ** 2, 0.0) ** (1 / (prof.gas.gamma - 1))
        assert np.max(np.abs(snap.rho * scale - f)) < 0.05 * f.max()


def test_snapshot_times_must_increase():
    grid = Grid.symmetric(1.0, 20)
    run = PmeRun(GAS, DAMP, grid, np.ones(20), 2.0)
    with pytest.raises(ValueError):
        run_snapshots(run, [1.0])

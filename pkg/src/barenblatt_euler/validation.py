"""Acceptance checks, each an independent oracle comparison with a stated tolerance."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, special

from . import entropy
from .barenblatt import profile_from_mass
from .euler import (PerturbedBarenblatt, SolverConfig, TwoBumps, damping_factor,
                    geometric_times, run)
from .gas import DampingLaw, GasLaw, Grid, check_pressure_gap
from .pme import PmeRun, evolve
from .rates import closed_form_rates, fit_decay, iterate_rates, junction


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float


@dataclass(frozen=True)
class Criterion:
    number: int
    name: str
    check: Callable[[], tuple]
    quick: bool


def _fmt(x: float) -> str:
    return f"{x:.3g}"


# 1 ----------------------------------------------------------------------

def continuity_residual(profile, t: float, h: float) -> float:
    """Max centered-difference residual of rho_t + m_x over the inner 70% of the support."""
    R = profile.support_radius(t)
    x = np.linspace(-0.7 * R, 0.7 * R, 41)
    drho = (profile.density(x, t + h) - profile.density(x, t - h)) / (2.0 * h)
    dm = (profile.momentum(x + h, t) - profile.momentum(x - h, t)) / (2.0 * h)
    return float(np.max(np.abs(drho + dm)))


def darcy_residual(profile, t: float) -> float:
    """Relative gap between the momentum and -kappa (1+t)^lam d/dx rho^gamma on the inner support."""
    R = profile.support_radius(t)
    x = np.linspace(-0.7 * R, 0.7 * R, 41)
    h = 1e-4 * R
    gas = profile.gas
    p = lambda y: gas.kappa * (1.0 + t) ** profile.damping.lam * profile.density(y, t) ** gas.gamma
    darcy = -(p(x + h) - p(x - h)) / (2.0 * h)
    m = profile.momentum(x, t)
    return float(np.max(np.abs(darcy - m)) / np.max(np.abs(m)))


def quadrature_mass(profile, t: float) -> float:
    R = profile.support_radius(t)
    val, _ = integrate.quad(lambda x: profile.density(x, t), -R, R,
                            epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def check_barenblatt():
    worst_mass, worst_order, worst_darcy = 0.0, np.inf, 0.0
    for g in (1.5, 2.0, 2.5):
        for lam in (0.2, 0.5, 0.8):
            prof = profile_from_mass(GasLaw(g), DampingLaw(lam), 1.0)
            for t in (0.0, 10.0, 100.0):
                worst_mass = max(worst_mass, abs(quadrature_mass(prof, t) - 1.0))
                worst_darcy = max(worst_darcy, darcy_residual(prof, t))
            res = [continuity_residual(prof, 1.0, h) for h in (0.02, 0.01, 0.005)]
            orders = np.log2(np.array(res[:-1]) / np.array(res[1:]))
            worst_order = min(worst_order, float(orders.min()))
    ok = worst_mass <= 1e-10 and worst_order >= 2.0 and worst_darcy <= 1e-6
    return ok, (f"max mass error {_fmt(worst_mass)} (<= 1e-10), min residual order "
                f"{worst_order:.6f} (>= 2), Darcy residual {_fmt(worst_darcy)} (<= 1e-6)")


# 2 ----------------------------------------------------------------------

def pme_errors(cells=(100, 200, 400), gamma=2.0, lam=0.5, t_end=1.0):
    gas, damping = GasLaw(gamma), DampingLaw(lam)
    prof = profile_from_mass(gas, damping, 1.0)
    half = 1.5 * prof.support_radius(t_end)
    errors = []
    for n in cells:
        grid = Grid.symmetric(half, n)
        out = evolve(PmeRun(gas, damping, grid, prof.cell_averages(grid, 0.0), 0.0), t_end)
        errors.append(float(np.sum(np.abs(out.rho - prof.cell_averages(grid, t_end))) * grid.dx))
    return errors


def check_pme():
    errors = pme_errors()
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    ok = bool(np.all(orders >= 1.0))
    return ok, ("L1 errors " + ", ".join(_fmt(e) for e in errors)
                + "; orders " + ", ".join(f"{o:.2f}" for o in orders) + " (>= 1.0)")


# 3 ----------------------------------------------------------------------

def remainder_by_quad(gas: GasLaw, rho: float, u: float) -> float:
    """A(rho, m) as the Taylor remainder of |xi|^p about u = 0, integrated adaptively."""
    p = entropy.tilde_power(gas)
    l = gas.l_exp
    r = rho ** gas.theta

    def integrand(z):
        s = z * r
        g = abs(u + s) ** p
        g0 = abs(s) ** p
        g1 = p * abs(s) ** (p - 1.0) * math.copysign(1.0, s) if s != 0 else 0.0
        g2 = p * (p - 1.0) * abs(s) ** (p - 2.0)
        return (g - g0 - g1 * u - 0.5 * g2 * u * u) * (1.0 - z * z) ** l

    pts = [0.0]
    if abs(u) < r:
        pts.append(-u / r)
    val, _ = integrate.quad(integrand, -1.0, 1.0, points=pts, epsabs=1e-14, epsrel=1e-13,
                            limit=200)
    return rho * val


def check_entropy_constants():
    worst_c1 = 0.0
    for g in (1.2, 1.5, 2.0, 2.5, 2.9):
        gas = GasLaw(g)
        b = (g + 1.0) / (2.0 * (g - 1.0))
        ref = 0.5 * special.beta(b, b)
        worst_c1 = max(worst_c1, abs(entropy.c1_by_quadrature(gas) - ref) / ref)
    consts2 = entropy.EntropyConstants.for_gas(GasLaw(2.0))
    const_err = max(abs(consts2.C1 - math.pi / 16), abs(consts2.C2 - 0.75 * math.pi))

    worst_id = 0.0
    rhos = np.linspace(0.1, 2.0, 20)
    us = np.linspace(-2.0, 2.0, 20)
    for g in (1.5, 2.0, 2.5):
        gas = GasLaw(g)
        c = entropy.EntropyConstants.for_gas(gas)
        R, U = np.meshgrid(rhos, us)
        eta, _ = entropy.tilde_eta(gas, c, R.ravel(), (R * U).ravel())
        for e, r, u in zip(eta, R.ravel(), U.ravel()):
            rhs = c.C1 * r ** (g + 1) + c.C2 * (r * u) ** 2 + remainder_by_quad(gas, r, u)
            worst_id = max(worst_id, abs(e - rhs) / max(1.0, abs(e)))

    eta, A = entropy.tilde_eta(GasLaw(2.0), consts2, 1.0, 1.0)
    spot = max(abs(eta - 21 * math.pi / 16), abs(A - math.pi / 2))
    ok = worst_c1 <= 1e-10 and const_err <= 1e-12 and worst_id <= 1e-9 and spot <= 1e-9
    return ok, (f"C1 rel err {_fmt(worst_c1)}, gamma=2 constants {_fmt(const_err)}, "
                f"identity {_fmt(worst_id)}, spot {_fmt(spot)}")


# 4 ----------------------------------------------------------------------

def check_remainder_grid():
    min_a, min_growth = np.inf, np.inf
    for g in (1.5, 2.0, 2.5):
        gas = GasLaw(g)
        c = entropy.EntropyConstants.for_gas(gas)
        for rho in np.linspace(0.1, 2.0, 20):
            for u in np.linspace(-2.0, 2.0, 20):
                rep = entropy.check_remainder(gas, c, float(rho), float(u))
                min_a = min(min_a, rep.A)
                min_growth = min(min_growth, rep.A_m_times_m - 3.0 * rep.A)
    ok = min_a >= -1e-8 and min_growth >= -1e-6
    return ok, f"min A {_fmt(min_a)} (>= -1e-8), min A_m m - 3A {_fmt(min_growth)} (>= -1e-6)"


# 5 ----------------------------------------------------------------------

def check_pressure_inequality(seed: int = 12345):
    rng = np.random.default_rng(seed)
    bad = 0
    for g in (1.5, 2.0, 2.5):
        pairs = rng.uniform(0.0, 2.0, size=(10_000, 2))
        rep = check_pressure_gap(GasLaw(g), pairs[:, 0], pairs[:, 1], bound=2.0)
        bad += int(np.sum(rep.monotone_gap < rep.power_gap))
    return bad == 0, f"{bad} violations in 3 x 10^4 pairs"


# 6 ----------------------------------------------------------------------

def check_rates():
    worst_iter, worst_branch, worst_alpha_max = 0.0, 0.0, 0.0
    monotone = True
    for g in np.linspace(1.05, 2.95, 20):
        for lam in np.linspace(0.03, 0.97, 20):
            it = iterate_rates(g, lam)
            worst_iter = max(worst_iter, abs(it.mu_tilde - closed_form_rates(g, lam).mu_tilde))
            trace = np.array(it.iteration_trace)
            monotone &= bool(np.all(np.diff(trace, axis=0) >= -1e-15))
    for g in np.linspace(1.02, 2.98, 50):
        lj = junction(g)
        g1 = g + 1.0
        mu1 = 1.0 + lj - (lj + 1.0) / (2.0 * g1)
        mu2 = 1.5 + 0.5 * lj - (lj + 1.0) / g1
        a1 = (lj + 1.0) / (4.0 * g1)
        a2 = 0.25 * (1.0 - lj)
        worst_branch = max(worst_branch, abs(mu1 - mu2), abs(a1 - a2))
        lams = np.linspace(1e-3, 1 - 1e-3, 2001)
        alphas = np.array([closed_form_rates(g, x).alpha_tilde for x in lams])
        worst_alpha_max = max(worst_alpha_max,
                              abs(closed_form_rates(g, lj).alpha_tilde - 1.0 / (2.0 * (g + 2.0))),
                              max(0.0, alphas.max() - 1.0 / (2.0 * (g + 2.0))))
    spots = {0.2: (1.0, 0.1), 0.5: (1.25, 0.125), 0.8: (1.3, 0.05)}
    worst_spot = max(max(abs(closed_form_rates(2.0, k).mu_tilde - v[0]),
                         abs(closed_form_rates(2.0, k).alpha_tilde - v[1]))
                     for k, v in spots.items())
    ok = (worst_iter <= 1e-9 and worst_branch <= 1e-12 and worst_alpha_max <= 1e-12
          and monotone and worst_spot <= 1e-12)
    return ok, (f"iteration vs closed form {_fmt(worst_iter)}, branch gap {_fmt(worst_branch)}, "
                f"alpha max {_fmt(worst_alpha_max)}, traces monotone {monotone}, spots {_fmt(worst_spot)}")


# 7 and 8 ----------------------------------------------------------------

STRUCTURE_HALF_WIDTH = 4.0


def structure_runs(steps: int = 10_000, cells: int = 2000):
    gas, damping = GasLaw(2.0), DampingLaw(0.5)
    grid = Grid.symmetric(STRUCTURE_HALF_WIDTH, cells)
    out = {}
    for name, data in (("perturbed Barenblatt", PerturbedBarenblatt(1.0, t0=1.0)),
                       ("two bumps", TwoBumps())):
        cfg = SolverConfig(gas, damping, grid, t_end=1e12, initial_data=data,
                           track_entropy=True, max_steps=steps)
        out[name] = run(cfg)
    return out


_structure_cache = {}


def _structure():
    if "runs" not in _structure_cache:
        _structure_cache["runs"] = structure_runs()
    return _structure_cache["runs"]


def check_euler_structure():
    parts, ok = [], True
    for name, res in _structure().items():
        good = (len(res.records) == 10_000 and res.mass_drift <= 1e-11 and res.min_rho >= 0
                and res.w_excess <= 1e-6 and res.z_excess <= 1e-6)
        ok &= good
        parts.append(f"{name}: {len(res.records)} steps, mass drift {_fmt(res.mass_drift)}, "
                     f"min rho {_fmt(res.min_rho)}, w/z excess {_fmt(res.w_excess)}/{_fmt(res.z_excess)}")
    return ok, "; ".join(parts)


def check_entropy_budgets():
    parts, ok = [], True
    for name, res in _structure().items():
        b = res.budget
        good = b.energy_slack() <= 1e-3 and b.tilde_slack() <= 1e-3
        ok &= good
        end_e = (b.energy[-1] + b.energy_dissipation[-1]) / b.energy[0] - 1.0
        end_t = (b.tilde[-1] + b.tilde_dissipation[-1]) / b.tilde[0] - 1.0
        parts.append(f"{name}: max slack {_fmt(b.energy_slack())}/{_fmt(b.tilde_slack())} "
                     f"(<= 1e-3), final {_fmt(end_e)}/{_fmt(end_t)}, "
                     f"min A_m m increment {_fmt(b.a_part_min())}")
    return ok, "; ".join(parts)


# 9 ----------------------------------------------------------------------

def decay_run(lam: float, gamma: float = 2.0, cells: int = 2000, t_end: float = 400.0,
              t0: float = 1.0, amplitude: float = 0.3, ratio: float = 1.3):
    gas, damping = GasLaw(gamma), DampingLaw(lam)
    data = PerturbedBarenblatt(1.0, t0=t0, amplitude=amplitude)
    prof = profile_from_mass(gas, damping, 1.0)
    half = 1.5 * prof.support_radius(t_end) + data.extent(gas, damping)
    cfg = SolverConfig(gas, damping, Grid.symmetric(half, cells), t_end, data,
                       output_times=geometric_times(t0, t_end, ratio))
    return run(cfg)


def check_decay():
    parts, ok = [], True
    for lam in (0.2, 0.5, 0.8):
        res = decay_run(lam)
        t = np.array([d["t"] for d in res.diagnostics])
        fit_p = fit_decay(t, [d["lgp1_gap"] for d in res.diagnostics], (40.0, 400.0))
        fit_1 = fit_decay(t, [d["l1_gap"] for d in res.diagnostics], (40.0, 400.0))
        rates = closed_form_rates(2.0, lam)
        good = (fit_p.slope <= -(rates.mu_tilde - 0.2) and fit_1.slope <= -(rates.alpha_tilde - 0.1)
                and fit_p.r_squared >= 0.9)
        ok &= good
        parts.append(f"lambda={lam}: L^3 slope {fit_p.slope:.3f} <= {-(rates.mu_tilde - 0.2):.3f} "
                     f"(R2 {fit_p.r_squared:.4f}), L1 slope {fit_1.slope:.3f} <= "
                     f"{-(rates.alpha_tilde - 0.1):.3f}")
    return ok, "; ".join(parts)


# 10 ---------------------------------------------------------------------

def check_damping_integrator(seed: int = 2024):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(20):
        lam = float(rng.uniform(0.01, 0.99))
        t0 = float(rng.uniform(0.0, 50.0))
        dt = float(rng.uniform(1e-3, 10.0))
        sol = integrate.solve_ivp(lambda t, m: -m / (1.0 + t) ** lam, (t0, t0 + dt), [1.0],
                                  method="DOP853", rtol=1e-13, atol=1e-300)
        ref = sol.y[0, -1]
        worst = max(worst, abs(damping_factor(DampingLaw(lam), t0, dt) - ref) / ref)
    return worst <= 1e-10, f"max relative error {_fmt(worst)} (<= 1e-10)"


CRITERIA = (
    Criterion(1, "Barenblatt mass and continuity", check_barenblatt, True),
    Criterion(2, "PME solver against closed form", check_pme, True),
    Criterion(3, "entropy constants and decomposition", check_entropy_constants, True),
    Criterion(4, "remainder nonnegativity and growth", check_remainder_grid, True),
    Criterion(5, "pressure monotonicity inequality", check_pressure_inequality, True),
    Criterion(6, "rate calculus", check_rates, True),
    Criterion(7, "Euler conservation, positivity, invariant region", check_euler_structure, False),
    Criterion(8, "entropy budgets", check_entropy_budgets, False),
    Criterion(9, "empirical decay rates", check_decay, False),
    Criterion(10, "damping integrator", check_damping_integrator, True),
)


def run_criterion(c: Criterion) -> CriterionResult:
    start = time.perf_counter()
    try:
        ok, detail = c.check()
    except Exception as exc:  # a crash is a failure of that criterion, not of the suite
        ok, detail = False, f"error: {type(exc).__name__}: {exc}"
    return CriterionResult(c.number, c.name, bool(ok), detail, time.perf_counter() - start)


def validate_suite(quick: bool = False, stream=None, numbers=None):
    """Run the criteria in order, print one line each, return (all passed, results)."""
    results = []
    for c in CRITERIA:
        if quick and not c.quick:
            continue
        if numbers is not None and c.number not in numbers:
            continue
        r = run_criterion(c)
        results.append(r)
        if stream is not None:
            print(f"[{'PASS' if r.passed else 'FAIL'}] {r.number:>2} {r.name} "
                  f"({r.seconds:.1f}s): {r.detail}", file=stream, flush=True)
    return all(r.passed for r in results), results

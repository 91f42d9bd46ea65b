"""Finite-volume solver for isentropic Euler with time-dependent damping

    rho_t + m_x = 0
    m_t + (m^2/rho + kappa rho^gamma)_x = -m / (1+t)^lam

Local Lax-Friedrichs fluxes for the hyperbolic part, followed by the exact
solution of the damping ODE (first-order splitting).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import entropy
from .barenblatt import BarenblattProfile, profile_from_mass
from .gas import (DRY_THRESHOLD, DampingLaw, DomainError, FieldState, GasLaw, Grid,
                  riemann_invariants, sound_speed, velocity)
from .rates import gap_norms, y_potential

logger = logging.getLogger(__name__)


class SolverError(RuntimeError):
    pass


# --------------------------------------------------------------------------
# initial data
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BarenblattAt:
    """The Barenblatt profile and its Darcy momentum at time t0."""

    mass: float
    t0: float = 0.0

    def extent(self, gas, damping):
        return profile_from_mass(gas, damping, self.mass).support_radius(self.t0)

    def build(self, gas, damping, grid):
        prof = profile_from_mass(gas, damping, self.mass)
        rho = prof.cell_averages(grid, self.t0)
        mom = prof.s * grid.centers() * rho / (1.0 + self.t0)
        return FieldState(self.t0, rho, np.where(rho > 0, mom, 0.0))


@dataclass(frozen=True)
class PerturbedBarenblatt:
    """Barenblatt density times (1 + amplitude sin(2 pi x / wavelength + phase)).

    The result is rescaled to the requested mass; with phase 0 the mode is odd
    and the rescale is a no-op. Velocity is zero unless ``darcy`` is set.
    """

    mass: float
    t0: float = 1.0
    amplitude: float = 0.3
    wavelength: Optional[float] = None
    phase: float = 0.0
    darcy: bool = False

    def extent(self, gas, damping):
        return profile_from_mass(gas, damping, self.mass).support_radius(self.t0)

    def build(self, gas, damping, grid):
        if not 0 <= self.amplitude < 1:
            raise DomainError("perturbation amplitude must lie in [0, 1)")
        prof = profile_from_mass(gas, damping, self.mass)
        wl = self.wavelength or prof.support_radius(self.t0)
        x = grid.centers()
        rho = prof.cell_averages(grid, self.t0) * (
            1.0 + self.amplitude * np.sin(2.0 * np.pi * x / wl + self.phase))
        rho *= self.mass / (np.sum(rho) * grid.dx)
        mom = prof.s * x * rho / (1.0 + self.t0) if self.darcy else np.zeros_like(rho)
        return FieldState(self.t0, rho, np.where(rho > 0, mom, 0.0))


@dataclass(frozen=True)
class TwoBumps:
    """Sum of cos^2 bumps with compact support, at rest."""

    centers: Sequence[float] = (-0.6, 0.6)
    widths: Sequence[float] = (0.4, 0.4)
    heights: Sequence[float] = (1.0, 0.5)
    t0: float = 0.0

    def extent(self, gas, damping):
        return max(abs(c) + w for c, w in zip(self.centers, self.widths))

    def build(self, gas, damping, grid):
        x = grid.centers()
        rho = np.zeros_like(x)
        for c, w, h in zip(self.centers, self.widths, self.heights):
            inside = np.abs(x - c) < w
            rho[inside] += h * np.cos(0.5 * np.pi * (x[inside] - c) / w) ** 2
        return FieldState(self.t0, rho, np.zeros_like(rho))


@dataclass(frozen=True)
class Riemann:
    rho_l: float
    u_l: float
    rho_r: float
    u_r: float
    x0: float = 0.0
    t0: float = 0.0

    def extent(self, gas, damping):
        return abs(self.x0)

    def build(self, gas, damping, grid):
        x = grid.centers()
        left = x < self.x0
        rho = np.where(left, self.rho_l, self.rho_r).astype(float)
        mom = np.where(left, self.rho_l * self.u_l, self.rho_r * self.u_r).astype(float)
        return FieldState(self.t0, rho, np.where(rho > 0, mom, 0.0))


@dataclass(frozen=True)
class Table:
    """Point samples interpolated linearly onto cell centers, zero outside."""

    x: Sequence[float]
    rho: Sequence[float]
    mom: Sequence[float]
    t0: float = 0.0

    def extent(self, gas, damping):
        return float(np.max(np.abs(self.x)))

    def build(self, gas, damping, grid):
        xc = grid.centers()
        rho = np.interp(xc, self.x, self.rho, left=0.0, right=0.0)
        mom = np.interp(xc, self.x, self.mom, left=0.0, right=0.0)
        return FieldState(self.t0, rho, np.where(rho > 0, mom, 0.0))


# --------------------------------------------------------------------------
# configuration and records
# --------------------------------------------------------------------------

@dataclass
class SolverConfig:
    gas: GasLaw
    damping: DampingLaw
    grid: Grid
    t_end: float
    initial_data: object
    cfl: float = 0.45
    output_times: Optional[Sequence[float]] = None
    dry_threshold: float = DRY_THRESHOLD
    boundary: str = "reflective"
    track_entropy: bool = False
    max_steps: Optional[int] = None

    def __post_init__(self):
        if not 0 < self.cfl < 1:
            raise DomainError(f"cfl must lie in (0, 1), got {self.cfl}")
        if not self.t_end > 0:
            raise DomainError(f"t_end must be positive, got {self.t_end}")
        if self.boundary not in ("reflective", "periodic"):
            raise DomainError(f"unknown boundary {self.boundary!r}")
        if self.output_times is not None:
            times = np.asarray(self.output_times, dtype=float)
            if np.any(np.diff(times) < 0):
                raise DomainError("output_times must be sorted")
            if times.size and (times[0] < 0 or times[-1] > self.t_end):
                raise DomainError("output_times must lie in [0, t_end]")

    @property
    def t_start(self) -> float:
        return float(getattr(self.initial_data, "t0", 0.0))


def geometric_times(t_start: float, t_end: float, ratio: float) -> list:
    """t_k = (1 + t_start) ratio^k - 1 up to t_end, with t_end appended."""
    if ratio <= 1:
        raise DomainError("snapshot ratio must exceed 1")
    times = []
    k = 0
    while True:
        t = (1.0 + t_start) * ratio ** k - 1.0
        if t >= t_end * (1 - 1e-12):
            break
        times.append(t)
        k += 1
    times.append(t_end)
    return times


@dataclass(frozen=True)
class StepRecord:
    t: float
    dt: float
    max_wave_speed: float
    mass: float
    momentum_total: float
    energy_total: float


# --------------------------------------------------------------------------
# fluxes and the damping integrator
# --------------------------------------------------------------------------

def physical_flux(gas: GasLaw, rho, mom, dry_threshold: float = DRY_THRESHOLD):
    rho = np.asarray(rho, dtype=float)
    mom = np.asarray(mom, dtype=float)
    u = velocity(rho, mom, dry_threshold)
    return mom, mom * u + gas.kappa * rho ** gas.gamma


def numerical_flux(gas: GasLaw, left, right, dry_threshold: float = DRY_THRESHOLD):
    """Local Lax-Friedrichs flux between states ``left`` = (rho, m) and ``right``."""
    rl, ml = (np.asarray(v, dtype=float) for v in left)
    rr, mr = (np.asarray(v, dtype=float) for v in right)
    if np.any(rl < 0) or np.any(rr < 0):
        raise DomainError("negative density in flux evaluation")
    ul = velocity(rl, ml, dry_threshold)
    ur = velocity(rr, mr, dry_threshold)
    a = np.maximum(np.abs(ul) + sound_speed(gas, rl), np.abs(ur) + sound_speed(gas, rr))
    fl0, fl1 = physical_flux(gas, rl, ml, dry_threshold)
    fr0, fr1 = physical_flux(gas, rr, mr, dry_threshold)
    f0 = 0.5 * (fl0 + fr0) - 0.5 * a * (rr - rl)
    f1 = 0.5 * (fl1 + fr1) - 0.5 * a * (mr - ml)
    if np.ndim(f0) == 0:
        return float(f0), float(f1)
    return f0, f1


def damping_factor(damping: DampingLaw, t0, dt):
    """exp(-int_{t0}^{t0+dt} (1+s)^-lam ds): the exact multiplier for m' = -m/(1+t)^lam."""
    e = 1.0 - damping.lam
    t0 = np.asarray(t0, dtype=float)
    # (1+t0)^e * expm1(e*log1p(dt/(1+t0))) keeps precision for small dt
    base = 1.0 + t0
    growth = base ** e * np.expm1(e * np.log1p(np.asarray(dt, dtype=float) / base))
    out = np.exp(-growth / e)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# stepping
# --------------------------------------------------------------------------

def _with_ghosts(rho, mom, boundary):
    if boundary == "periodic":
        return (np.concatenate(([rho[-1]], rho, [rho[0]])),
                np.concatenate(([mom[-1]], mom, [mom[0]])))
    return (np.concatenate(([rho[0]], rho, [rho[-1]])),
            np.concatenate(([-mom[0]], mom, [-mom[-1]])))


def max_wave_speed(config: SolverConfig, state: FieldState) -> float:
    u = velocity(state.rho, state.mom, config.dry_threshold)
    return float(np.max(np.abs(u) + sound_speed(config.gas, state.rho)))


def _hyperbolic(config: SolverConfig, rho, mom, dt):
    rg, mg = _with_ghosts(rho, mom, config.boundary)
    f0, f1 = numerical_flux(config.gas, (rg[:-1], mg[:-1]), (rg[1:], mg[1:]),
                            config.dry_threshold)
    if config.boundary == "reflective":
        f0[0] = f0[-1] = 0.0   # exact zero mass flux through walls
    ratio = dt / config.grid.dx
    return rho - ratio * np.diff(f0), mom - ratio * np.diff(f1)


@dataclass(frozen=True)
class _Substeps:
    state: FieldState
    mom_hyperbolic: np.ndarray
    factor: float
    dt: float
    speed: float


def _advance(config: SolverConfig, state: FieldState, dt_cap: float = np.inf) -> _Substeps:
    speed = max_wave_speed(config, state)
    if speed == 0.0:
        if np.any(state.rho) or np.any(state.mom):
            raise SolverError("zero wave speed with nonzero fields")
        dt = min(dt_cap, config.t_end - state.t)
        return _Substeps(FieldState(state.t + dt, state.rho, state.mom),
                         state.mom, 1.0, dt, 0.0)
    cfl = config.cfl
    for _ in range(8):
        dt = min(cfl * config.grid.dx / speed, dt_cap)
        rho, mom = _hyperbolic(config, state.rho, state.mom, dt)
        if not (np.all(np.isfinite(rho)) and np.all(np.isfinite(mom))):
            raise SolverError(f"non-finite values after step at t={state.t:.6g}, dt={dt:.3e}")
        floor = -1e-14 * float(np.max(state.rho))
        if rho.min() >= floor:
            break
        logger.warning("negative density %.3e at t=%.6g; halving cfl", rho.min(), state.t)
        cfl *= 0.5
    else:
        raise SolverError(f"could not keep density positive at t={state.t:.6g}")
    rho = np.maximum(rho, 0.0)
    factor = damping_factor(config.damping, state.t, dt)
    mom_h = np.where(rho >= config.dry_threshold, mom, 0.0)
    new = FieldState(state.t + dt, rho, mom_h * factor)
    return _Substeps(new, mom_h, factor, dt, speed)


def _record(config: SolverConfig, sub: _Substeps) -> StepRecord:
    s = sub.state
    dx = config.grid.dx
    return StepRecord(
        s.t, sub.dt, sub.speed,
        float(np.sum(s.rho) * dx),
        float(np.sum(s.mom) * dx),
        float(np.sum(entropy.mechanical_energy(config.gas, s.rho, s.mom,
                                               config.dry_threshold)) * dx),
    )


def step(config: SolverConfig, state: FieldState, dt_cap: float = np.inf):
    """One split step. Returns (new state, StepRecord)."""
    sub = _advance(config, state, dt_cap)
    return sub.state, _record(config, sub)


# --------------------------------------------------------------------------
# full runs
# --------------------------------------------------------------------------

@dataclass
class EntropyBudget:
    """Running totals for the two integrated entropy inequalities.

    ``energy_dissipation`` integrates m^2/((1+t)^lam rho) and ``tilde_dissipation``
    integrates (2 C2 m^2 + A_m m)/(1+t)^lam, both exactly over each damping
    substep. ``quadratic_dissipation`` is the 2 C2 m^2 part alone.
    """

    t: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    energy_dissipation: list = field(default_factory=list)
    tilde: list = field(default_factory=list)
    tilde_dissipation: list = field(default_factory=list)
    quadratic_dissipation: list = field(default_factory=list)

    def energy_slack(self) -> float:
        """max_t (E(t) + D(t) - E(0)) / E(0); the inequality holds when <= 0."""
        lhs = np.asarray(self.energy) + np.asarray(self.energy_dissipation)
        return float(np.max(lhs - self.energy[0]) / self.energy[0])

    def tilde_slack(self) -> float:
        lhs = np.asarray(self.tilde) + np.asarray(self.tilde_dissipation)
        return float(np.max(lhs - self.tilde[0]) / self.tilde[0])

    def a_part_min(self) -> float:
        """Smallest increment of the A_m m part; nonnegative by the remainder inequality."""
        a_part = np.asarray(self.tilde_dissipation) - np.asarray(self.quadratic_dissipation)
        return float(np.min(np.diff(a_part))) if a_part.size > 1 else 0.0


@dataclass
class RunResult:
    config: SolverConfig
    profile: BarenblattProfile
    snapshots: list
    records: list
    diagnostics: list
    budget: Optional[EntropyBudget]
    w_bound: float
    z_bound: float
    w_excess: float
    z_excess: float
    min_rho: float

    initial: Optional[FieldState] = None

    @property
    def mass_drift(self) -> float:
        """Largest relative deviation of the per-step mass from the initial mass."""
        ref = float(np.sum(self.initial.rho) * self.config.grid.dx)
        if not self.records or ref == 0:
            return 0.0
        return float(max(abs(r.mass - ref) for r in self.records) / ref)


def _invariant_extremes(config, state):
    u = velocity(state.rho, state.mom, config.dry_threshold)
    w, z = riemann_invariants(config.gas, state.rho, u)
    return float(np.max(w)), float(np.min(z))


def diagnostics_row(config: SolverConfig, profile: BarenblattProfile, state: FieldState,
                    dt: float) -> dict:
    gas, grid = config.gas, config.grid
    dx = grid.dx
    consts = entropy.EntropyConstants.for_gas(gas)
    u = velocity(state.rho, state.mom, config.dry_threshold)
    gaps = gap_norms(state, profile, grid)
    y = y_potential(state, profile, grid)
    eta_t, _ = entropy.tilde_eta(gas, consts, state.rho, state.mom)
    return {
        "t": state.t,
        "dt": dt,
        "mass": float(np.sum(state.rho) * dx),
        "mom_total": float(np.sum(state.mom) * dx),
        "energy": float(np.sum(entropy.mechanical_energy(gas, state.rho, state.mom,
                                                         config.dry_threshold)) * dx),
        "tilde_eta_total": float(np.sum(eta_t) * dx),
        "l1_gap": gaps.l1,
        "lgp1_gap": gaps.lp[gas.gamma + 1.0],
        "y_l2": float(np.sqrt(np.sum(y * y) * dx)),
        "y_linf": float(np.max(np.abs(y))),
        "min_rho": float(state.rho.min()),
        "max_rho": float(state.rho.max()),
        "max_abs_u": float(np.max(np.abs(u))),
    }


DIAGNOSTIC_COLUMNS = ("t", "dt", "mass", "mom_total", "energy", "tilde_eta_total", "l1_gap",
                      "lgp1_gap", "y_l2", "y_linf", "min_rho", "max_rho", "max_abs_u")


def _interpolate(a: FieldState, b: FieldState, t: float) -> FieldState:
    if b.t == a.t:
        return b
    w = (t - a.t) / (b.t - a.t)
    rho = (1.0 - w) * a.rho + w * b.rho
    mom = (1.0 - w) * a.mom + w * b.mom
    return FieldState(t, rho, np.where(rho > 0, mom, 0.0))


def initial_state(config: SolverConfig) -> FieldState:
    return config.initial_data.build(config.gas, config.damping, config.grid)


def run(config: SolverConfig, state: Optional[FieldState] = None) -> RunResult:
    """March to t_end, collecting snapshots at ``output_times`` and per-step records."""
    gas, dx = config.gas, config.grid.dx
    if state is None:
        state = initial_state(config)
    initial = state
    times = list(config.output_times) if config.output_times is not None else [config.t_end]
    times = [t for t in times if t >= state.t - 1e-14]
    mass0 = float(np.sum(state.rho) * dx)
    profile = profile_from_mass(gas, config.damping, mass0) if mass0 > 0 else None
    consts = entropy.EntropyConstants.for_gas(gas)

    budget = None
    if config.track_entropy:
        budget = EntropyBudget()
        eta0, _ = entropy.tilde_eta(gas, consts, state.rho, state.mom)
        budget.t.append(state.t)
        budget.energy.append(float(np.sum(entropy.mechanical_energy(
            gas, state.rho, state.mom, config.dry_threshold)) * dx))
        budget.energy_dissipation.append(0.0)
        budget.tilde.append(float(np.sum(eta0) * dx))
        budget.tilde_dissipation.append(0.0)
        budget.quadratic_dissipation.append(0.0)

    w_bound, z_bound = _invariant_extremes(config, state)
    w_excess = z_excess = 0.0
    min_rho = float(state.rho.min())

    snapshots, diagnostics, records = [], [], []
    pending = list(times)

    def emit(snap, dt):
        snapshots.append(snap)
        if profile is not None:
            diagnostics.append(diagnostics_row(config, profile, snap, dt))

    while pending and pending[0] <= state.t + 1e-14:
        emit(FieldState(pending.pop(0), state.rho, state.mom), 0.0)

    n = 0
    while state.t < config.t_end * (1 - 1e-14) and pending:
        if config.max_steps is not None and n >= config.max_steps:
            break
        sub = _advance(config, state, dt_cap=config.t_end - state.t)
        new = sub.state
        n += 1
        records.append(_record(config, sub))
        min_rho = min(min_rho, float(new.rho.min()))
        w, z = _invariant_extremes(config, new)
        w_excess = max(w_excess, w - w_bound)
        z_excess = max(z_excess, z_bound - z)
        if budget is not None:
            rho = new.rho
            wet = rho > config.dry_threshold
            mh = sub.mom_hyperbolic
            loss = np.divide(mh * mh * (1.0 - sub.factor ** 2), 2.0 * rho,
                             out=np.zeros_like(rho), where=wet)
            eta_h, _ = entropy.tilde_eta(gas, consts, rho, mh)
            eta_n, _ = entropy.tilde_eta(gas, consts, rho, new.mom)
            budget.t.append(new.t)
            budget.energy.append(records[-1].energy_total)
            budget.energy_dissipation.append(budget.energy_dissipation[-1] + float(np.sum(loss) * dx))
            budget.tilde.append(float(np.sum(eta_n) * dx))
            budget.tilde_dissipation.append(
                budget.tilde_dissipation[-1] + float(np.sum(eta_h - eta_n) * dx))
            budget.quadratic_dissipation.append(
                budget.quadratic_dissipation[-1]
                + float(np.sum(consts.C2 * mh * mh * (1.0 - sub.factor ** 2)) * dx))
        while pending and pending[0] <= new.t + 1e-14:
            emit(_interpolate(state, new, min(pending.pop(0), new.t)), sub.dt)
        state = new

    return RunResult(config, profile, snapshots, records, diagnostics, budget,
                     w_bound, z_bound, w_excess, z_excess, min_rho, initial)

"""Explicit finite-difference solver for rho_t = kappa (1+t)^lam (rho^gamma)_xx.

The time change tau = ((1+t)^(1+lam) - 1)/(1+lam) turns the equation into the
standard porous medium equation rho_tau = kappa (rho^gamma)_xx, which is what
gets stepped. Boundaries are zero-flux.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .gas import DampingLaw, GasLaw, Grid


class StabilityError(ValueError):
    pass


def rescale_time(damping: DampingLaw, t):
    e = 1.0 + damping.lam
    return ((1.0 + np.asarray(t, dtype=float)) ** e - 1.0) / e


def physical_time(damping: DampingLaw, tau):
    """Inverse of rescale_time."""
    e = 1.0 + damping.lam
    return (1.0 + e * np.asarray(tau, dtype=float)) ** (1.0 / e) - 1.0


@dataclass(frozen=True)
class PmeRun:
    gas: GasLaw
    damping: DampingLaw
    grid: Grid
    rho: np.ndarray
    t: float
    tau: float = None

    def __post_init__(self):
        if self.tau is None:
            object.__setattr__(self, "tau", float(rescale_time(self.damping, self.t)))

    @property
    def mass(self) -> float:
        return float(np.sum(self.rho) * self.grid.dx)


def max_stable_step(run: PmeRun) -> float:
    peak = float(np.max(run.rho))
    if peak <= 0:
        return np.inf
    g = run.gas.gamma
    return run.grid.dx ** 2 / (2.0 * run.gas.kappa * g * peak ** (g - 1.0))


def pme_step(run: PmeRun, dtau: float) -> PmeRun:
    limit = max_stable_step(run)
    if not 0 < dtau <= limit:
        raise StabilityError(f"dtau={dtau:.3e} outside (0, {limit:.3e}]")
    pres = run.gas.kappa * run.rho ** run.gas.gamma
    flux = np.zeros(run.rho.size + 1)
    flux[1:-1] = np.diff(pres) / run.grid.dx
    rho = run.rho + dtau / run.grid.dx * np.diff(flux)
    # round-off only; the stability bound keeps the update a convex combination
    rho = np.maximum(rho, 0.0)
    tau = run.tau + dtau
    return replace(run, rho=rho, tau=tau, t=float(physical_time(run.damping, tau)))


def evolve(run: PmeRun, t_target: float, safety: float = 0.9) -> PmeRun:
    """Step until the physical time reaches ``t_target`` (last step shortened)."""
    tau_target = float(rescale_time(run.damping, t_target))
    while run.tau < tau_target:
        dtau = min(safety * max_stable_step(run), tau_target - run.tau)
        run = pme_step(run, dtau)
    return replace(run, t=float(t_target), tau=tau_target)


def run_snapshots(run: PmeRun, times):
    """Evolve through the sorted ``times`` and return the run at each one."""
    out = []
    for t in times:
        if t < run.t:
            raise ValueError(f"snapshot time {t} precedes current time {run.t}")
        run = evolve(run, t)
        out.append(run)
    return out

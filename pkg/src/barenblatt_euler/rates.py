"""Decay-rate calculus and the empirical gap diagnostics it is compared with.

The exponents returned here are the supremal ones: the guaranteed decay of
||rho - rho_bar||_{L^{gamma+1}}^{gamma+1} is (1+t)^-(mu - eps) for every eps > 0,
and likewise (1+t)^-(alpha - eps) for the L^1 gap.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .barenblatt import BarenblattProfile
from .gas import DomainError, FieldState, Grid


class ConvergenceError(RuntimeError):
    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


def junction(gamma: float) -> float:
    """lambda at which both rate branches meet."""
    return gamma / (gamma + 2.0)


@dataclass(frozen=True)
class RateResult:
    mu_tilde: float
    alpha_tilde: float
    branch: int  # 1 if lambda <= gamma/(gamma+2), else 2
    iteration_trace: tuple = field(default=())


def _check(gamma, lam):
    if not 1.0 < gamma < 3.0:
        raise DomainError(f"gamma must lie in (1, 3), got {gamma}")
    if not 0.0 < lam < 1.0:
        raise DomainError(f"lambda must lie in (0, 1), got {lam}")


def closed_form_rates(gamma: float, lam: float) -> RateResult:
    _check(gamma, lam)
    g1 = gamma + 1.0
    if lam <= junction(gamma):
        return RateResult(1.0 + lam - (lam + 1.0) / (2.0 * g1), (lam + 1.0) / (4.0 * g1), 1)
    return RateResult(1.5 + 0.5 * lam - (lam + 1.0) / g1, 0.25 * (1.0 - lam), 2)


def iterate_rates(gamma: float, lam: float, tol: float = 1e-12, max_iter: int = 200) -> RateResult:
    """Run the mu/theta bootstrap from theta_0 = 0 to its fixed point.

    The trace holds (mu_k, theta_k) for k = 1, 2, ...; theta_k is the weight
    gained from mu_k and feeds mu_{k+1}.
    """
    _check(gamma, lam)
    if tol <= 0 or max_iter < 1:
        raise DomainError("need tol > 0 and max_iter >= 1")
    base = 1.0 + 0.5 * lam - (lam + 1.0) / (2.0 * (gamma + 1.0))
    cap = (gamma - lam) / (gamma + 1.0)

    def next_mu(theta):
        return min(1.0 + theta, base + 0.5 * theta)

    def next_theta(mu):
        return min(mu - lam, lam, cap)

    trace = []
    mu = next_mu(0.0)
    for _ in range(max_iter):
        theta = next_theta(mu)
        trace.append((mu, theta))
        mu_new = next_mu(theta)
        if abs(mu_new - mu) < tol:
            # L^1 exponent from the L^{gamma+1} one by splitting the support
            alpha = 0.5 * (mu_new - gamma * (lam + 1.0) / (gamma + 1.0))
            return RateResult(mu_new, alpha, 1 if lam <= junction(gamma) else 2, tuple(trace))
        mu = mu_new
    raise ConvergenceError(f"no fixed point within {max_iter} iterations", tuple(trace))


def _check_grid(field: FieldState, grid: Grid):
    if field.n_cells != grid.n_cells:
        raise DomainError(f"field has {field.n_cells} cells, grid has {grid.n_cells}")


def y_potential(field: FieldState, profile: BarenblattProfile, grid: Grid) -> np.ndarray:
    """y_i = -dx * sum_{j<=i} (rho_j - rho_bar_j), the value at the right face of cell i."""
    _check_grid(field, grid)
    gap = field.rho - profile.cell_averages(grid, field.t)
    return -grid.dx * np.cumsum(gap)


@dataclass(frozen=True)
class GapNorms:
    l1: float
    linf: float
    lp: dict          # p -> ||rho - rho_bar||_p^p
    weighted: float   # int rho_bar^(gamma-1) (rho - rho_bar)^2


def gap_norms(field: FieldState, profile: BarenblattProfile, grid: Grid, p_list=None) -> GapNorms:
    _check_grid(field, grid)
    g = profile.gas.gamma
    if p_list is None:
        p_list = (g + 1.0,)
    rho_bar = profile.cell_averages(grid, field.t)
    diff = np.abs(field.rho - rho_bar)
    lp = {p: float(np.sum(diff ** p) * grid.dx) for p in p_list}
    weighted = float(np.sum(rho_bar ** (g - 1.0) * diff ** 2) * grid.dx)
    return GapNorms(float(np.sum(diff) * grid.dx), float(diff.max()), lp, weighted)


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    r_squared: float
    window: tuple
    n_points: int


def fit_decay(times, values, window=None) -> DecayFit:
    """Least-squares fit of log(value) against log(1 + t) inside ``window``."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if window is None:
        window = (t.min(), t.max())
    keep = (t >= window[0]) & (t <= window[1])
    t, v = t[keep], v[keep]
    if t.size < 3:
        raise DomainError(f"need at least 3 points in window {window}, got {t.size}")
    if np.any(v <= 0):
        raise DomainError("values must be positive inside the fit window")
    x, y = np.log1p(t), np.log(v)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    ss_res = np.sum(resid ** 2)
    # a flat series is fitted perfectly by a flat line
    r2 = 1.0 if ss_tot <= 1e-30 * max(1.0, np.sum(y ** 2)) else 1.0 - ss_res / ss_tot
    return DecayFit(float(slope), float(intercept), float(r2),
                    (float(t.min()), float(t.max())), int(t.size))

"""Polytropic gas algebra shared by every solver in the package.

The pressure law is fixed to p = kappa * rho**gamma with
kappa = (gamma - 1)**2 / (4 gamma), which makes the Riemann invariants
u +/- rho**theta with unit coefficient.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DRY_THRESHOLD = 1e-12


class DomainError(ValueError):
    """Raised when an argument lies outside the mathematical domain of an operation."""


@dataclass(frozen=True)
class GasLaw:
    gamma: float

    def __post_init__(self):
        if not 1.0 < self.gamma < 3.0:
            raise DomainError(f"gamma must lie in (1, 3), got {self.gamma}")

    @property
    def kappa(self) -> float:
        return (self.gamma - 1.0) ** 2 / (4.0 * self.gamma)

    @property
    def theta(self) -> float:
        return 0.5 * (self.gamma - 1.0)

    @property
    def l_exp(self) -> float:
        """Exponent of the entropy kernel (1 - z**2)**l."""
        return (3.0 - self.gamma) / (2.0 * (self.gamma - 1.0))


@dataclass(frozen=True)
class DampingLaw:
    """Friction coefficient (1 + t)**(-lam)."""

    lam: float

    def __post_init__(self):
        if not 0.0 < self.lam < 1.0:
            raise DomainError(
                f"lambda must lie in (0, 1), got {self.lam}; "
                "at lambda = 1 the asymptotic profile is no longer the Barenblatt solution"
            )

    def coefficient(self, t):
        return (1.0 + np.asarray(t, dtype=float)) ** (-self.lam)


@dataclass(frozen=True)
class Grid:
    x_left: float
    dx: float
    n_cells: int

    def __post_init__(self):
        if not self.dx > 0:
            raise DomainError(f"dx must be positive, got {self.dx}")
        if self.n_cells < 2:
            raise DomainError(f"need at least 2 cells, got {self.n_cells}")

    @classmethod
    def symmetric(cls, half_width: float, n_cells: int) -> "Grid":
        return cls(-half_width, 2.0 * half_width / n_cells, n_cells)

    @property
    def x_right(self) -> float:
        return self.x_left + self.n_cells * self.dx

    def centers(self) -> np.ndarray:
        return self.x_left + (np.arange(self.n_cells) + 0.5) * self.dx

    def faces(self) -> np.ndarray:
        return self.x_left + np.arange(self.n_cells + 1) * self.dx


@dataclass(frozen=True)
class FieldState:
    """Cell averages of density and momentum at time t."""

    t: float
    rho: np.ndarray
    mom: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float)
        mom = np.asarray(self.mom, dtype=float)
        if rho.shape != mom.shape:
            raise DomainError(f"rho and mom shapes differ: {rho.shape} vs {mom.shape}")
        if self.t < 0:
            raise DomainError(f"time must be nonnegative, got {self.t}")
        if np.any(rho < 0):
            raise DomainError(f"negative density, min = {rho.min()}")
        if np.any((rho == 0) & (mom != 0)):
            raise DomainError("vacuum cells must carry zero momentum")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "mom", mom)

    @property
    def n_cells(self) -> int:
        return self.rho.size


def _density(rho):
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise DomainError(f"density must be nonnegative, got min {rho.min()}")
    return rho


def _out(value):
    return float(value) if np.ndim(value) == 0 else value


def pressure(gas: GasLaw, rho):
    rho = _density(rho)
    return _out(gas.kappa * rho ** gas.gamma)


def sound_speed(gas: GasLaw, rho):
    # sqrt(kappa * gamma) == theta by the choice of kappa
    rho = _density(rho)
    return _out(gas.theta * rho ** gas.theta)


def velocity(rho, mom, dry_threshold: float = DRY_THRESHOLD):
    """m / rho on wet cells, 0 below the dry threshold."""
    rho = np.asarray(rho, dtype=float)
    mom = np.asarray(mom, dtype=float)
    wet = (rho >= dry_threshold) & (rho > 0)
    u = np.divide(mom, rho, out=np.zeros(np.broadcast(rho, mom).shape), where=wet)
    return _out(u)


def riemann_invariants(gas: GasLaw, rho, u):
    """Return (w, z) = (u + rho**theta, u - rho**theta)."""
    rho = _density(rho)
    r = rho ** gas.theta
    u = np.asarray(u, dtype=float)
    return _out(u + r), _out(u - r)


def state_from_invariants(gas: GasLaw, w, z):
    """Inverse of riemann_invariants: returns (rho, u)."""
    w = np.asarray(w, dtype=float)
    z = np.asarray(z, dtype=float)
    half_gap = 0.5 * (w - z)
    if np.any(half_gap < 0):
        raise DomainError("need w >= z")
    return _out(half_gap ** (1.0 / gas.theta)), _out(0.5 * (w + z))


@dataclass(frozen=True)
class PressureGapReport:
    monotone_gap: object   # (rho^g - rb^g)(rho - rb)
    power_gap: object      # |rho - rb|^(g+1)
    weighted_gap: object   # (rho^(g-1) + rb^(g-1))(rho - rb)^2
    bregman_gap: object    # rho^(g+1) - rb^(g+1) - (g+1) rb^g (rho - rb)
    holds: bool

    def ratios(self):
        """Empirical (bregman / weighted, monotone / weighted) where weighted > 0.

        These bracket the unnamed constants of the two-sided comparisons.
        """
        weighted = np.atleast_1d(self.weighted_gap)
        keep = weighted > 0
        breg = np.atleast_1d(self.bregman_gap)[keep] / weighted[keep]
        mono = np.atleast_1d(self.monotone_gap)[keep] / weighted[keep]
        return breg, mono


def check_pressure_gap(gas: GasLaw, rho, rho_bar, bound: float = 2.0) -> PressureGapReport:
    rho = np.asarray(rho, dtype=float)
    rho_bar = np.asarray(rho_bar, dtype=float)
    for name, v in (("rho", rho), ("rho_bar", rho_bar)):
        if np.any(v < 0) or np.any(v > bound):
            raise DomainError(f"{name} must lie in [0, {bound}]")
    g = gas.gamma
    scalar = rho.ndim == 0 and rho_bar.ndim == 0
    # one code path for pow regardless of input shape, so equal terms round equally
    rho, rho_bar = np.atleast_1d(rho), np.atleast_1d(rho_bar)
    diff = rho - rho_bar
    # both written as |.| * |diff| so that the equality case at vacuum rounds identically
    monotone = np.abs(rho ** g - rho_bar ** g) * np.abs(diff)
    power = np.abs(diff) ** g * np.abs(diff)
    weighted = (rho ** (g - 1) + rho_bar ** (g - 1)) * diff ** 2
    bregman = rho ** (g + 1) - rho_bar ** (g + 1) - (g + 1) * rho_bar ** g * diff
    pick = (lambda v: float(v[0])) if scalar else (lambda v: v)
    return PressureGapReport(
        pick(monotone), pick(power), pick(weighted), pick(bregman),
        bool(np.all(monotone >= power)),
    )

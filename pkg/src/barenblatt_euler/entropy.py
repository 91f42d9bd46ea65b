"""Weak entropies of the isentropic Euler system and the |xi|^(2g/(g-1)) entropy.

Every weak entropy pair is generated by a function g through the kernel
chi(xi; rho, u) = (rho^(gamma-1) - (xi - u)^2)_+^l, which after the change of
variable xi = u + z rho^theta becomes

    eta = rho * int_{-1}^{1} g(u + z rho^theta) (1 - z^2)^l dz
    q   = rho * int_{-1}^{1} g(u + z rho^theta) (u + theta z rho^theta) (1 - z^2)^l dz

The weight (1 - z^2)^l is exactly the Gauss-Jacobi weight with alpha = beta = l.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .gas import DomainError, GasLaw, velocity

DEFAULT_NODES = 64


@lru_cache(maxsize=None)
def _jacobi(n: int, alpha: float, beta: float):
    return special.roots_jacobi(n, alpha, beta)


def beta(p, q):
    return special.beta(p, q)


def kernel_moment(gas: GasLaw, k: float) -> float:
    """int_{-1}^{1} |z|^k (1 - z^2)^l dz in closed form."""
    return float(beta(0.5 * (k + 1.0), gas.l_exp + 1.0))


def tilde_power(gas: GasLaw) -> float:
    return 2.0 * gas.gamma / (gas.gamma - 1.0)


@dataclass(frozen=True)
class EntropyConstants:
    C1: float
    C2: float

    @classmethod
    def for_gas(cls, gas: GasLaw) -> "EntropyConstants":
        g = gas.gamma
        half = (g + 1.0) / (2.0 * (g - 1.0))
        c1 = 0.5 * float(beta(half, half))
        c2 = 2.0 * g * (g + 1.0) / (g - 1.0) ** 2 * c1
        return cls(c1, c2)


def c1_by_quadrature(gas: GasLaw, nodes: int = DEFAULT_NODES) -> float:
    """C1 = int |z|^p (1 - z^2)^l dz evaluated with the kink-split rule."""
    eta, _ = _power_entropy_pair(gas, np.array([1.0]), np.array([0.0]), nodes)
    return float(eta[0])


def mechanical_energy(gas: GasLaw, rho, m, dry_threshold: float = 0.0):
    rho = np.asarray(rho, dtype=float)
    m = np.asarray(m, dtype=float)
    if np.any(rho < 0):
        raise DomainError("negative density")
    if np.any((rho == 0) & (m != 0)):
        raise DomainError("momentum must vanish at vacuum")
    wet = rho > dry_threshold
    kinetic = np.divide(m * m, 2.0 * rho, out=np.zeros(np.broadcast(rho, m).shape), where=wet)
    out = kinetic + gas.kappa / (gas.gamma - 1.0) * rho ** gas.gamma
    return float(out) if out.ndim == 0 else out


def chi(gas: GasLaw, xi, rho, u):
    rho = np.asarray(rho, dtype=float)
    core = rho ** (gas.gamma - 1.0) - (np.asarray(xi, dtype=float) - u) ** 2
    out = np.maximum(core, 0.0) ** gas.l_exp
    out = np.where(rho > 0, out, 0.0)
    return float(out) if out.ndim == 0 else out


def weak_entropy(gas: GasLaw, g, rho, u, nodes: int = DEFAULT_NODES):
    """Entropy pair (eta, q) generated by ``g``, by Gauss-Jacobi quadrature.

    ``g`` must accept numpy arrays. Exact for polynomial g of degree < 2*nodes.
    """
    rho = np.asarray(rho, dtype=float)
    u = np.asarray(u, dtype=float)
    if np.any(rho < 0):
        raise DomainError("negative density")
    z, w = _jacobi(nodes, gas.l_exp, gas.l_exp)
    r = (rho ** gas.theta)[..., None]
    uu = u[..., None]
    gv = np.asarray(g(uu + z * r), dtype=float)
    if not np.all(np.isfinite(gv)):
        raise FloatingPointError("generator returned non-finite values")
    eta = rho * np.sum(gv * w, axis=-1)
    q = rho * np.sum(gv * (uu + gas.theta * z * r) * w, axis=-1)
    if eta.ndim == 0:
        return float(eta), float(q)
    return eta, q


def _power_entropy_pair(gas: GasLaw, rho, u, nodes: int):
    """(eta, q) for g(xi) = |xi|^p, p = 2 gamma/(gamma - 1).

    g is only finitely smooth at xi = 0. When that point falls inside the
    kernel support the integral is split there and each half is mapped onto
    [-1, 1] with a Jacobi rule carrying (1-t)^l at the kernel end and
    (1+t)^p at the kink; what remains of the integrand is smooth.
    """
    p = tilde_power(gas)
    l = gas.l_exp
    th = gas.theta
    r = rho ** th
    eta = np.zeros_like(rho)
    q = np.zeros_like(rho)
    wet = r > 0

    p_int = int(round(p))
    if abs(p - p_int) < 1e-12 and p_int % 2 == 0:
        # g is a polynomial: a short rule is exact
        z, w = _jacobi(p_int // 2 + 2, l, l)
        rw, uw = r[wet, None], u[wet, None]
        xi = uw + z * rw
        gv = (xi * xi) ** (p_int // 2)
        eta[wet] = np.sum(gv * w, axis=-1)
        q[wet] = np.sum(gv * (uw + th * z * rw) * w, axis=-1)
        return rho * eta, rho * q

    z0 = np.full_like(rho, np.inf)
    z0[wet] = -u[wet] / r[wet]
    inside = wet & (np.abs(z0) < 1.0)
    outside = wet & ~inside

    if np.any(outside):
        z, w = _jacobi(nodes, l, l)
        ro, uo = r[outside, None], u[outside, None]
        xi = uo + z * ro
        gv = np.abs(xi) ** p
        eta[outside] = np.sum(gv * w, axis=-1)
        q[outside] = np.sum(gv * (uo + th * z * ro) * w, axis=-1)

    if np.any(inside):
        t, w = _jacobi(nodes, l, p)
        ri, ui, zi = r[inside, None], u[inside, None], z0[inside, None]
        e_acc = np.zeros(ri.shape[0])
        q_acc = np.zeros(ri.shape[0])
        # sign = +1: piece [z0, 1]; sign = -1: piece [-1, z0] reflected onto [-z0, 1]
        for sign in (1.0, -1.0):
            c = sign * zi
            half = 0.5 * (1.0 - c)
            zz = c + half * (1.0 + t)          # node positions in reflected frame
            smooth = (1.0 + zz) ** l
            factor = ri ** p * half ** (p + l + 1.0)
            e_acc += np.sum(factor * smooth * w, axis=-1)
            z_true = sign * zz
            q_acc += np.sum(factor * smooth * (ui + th * z_true * ri) * w, axis=-1)
        eta[inside] = e_acc
        q[inside] = q_acc
    return rho * eta, rho * q


def _as_arrays(rho, m):
    rho = np.asarray(rho, dtype=float)
    m = np.asarray(m, dtype=float)
    if np.any(rho < 0):
        raise DomainError("negative density")
    if np.any((rho == 0) & (m != 0)):
        raise DomainError("momentum must vanish at vacuum")
    scalar = rho.ndim == 0 and m.ndim == 0
    rho, m = np.broadcast_arrays(np.atleast_1d(rho), np.atleast_1d(m))
    return rho.astype(float), m.astype(float), scalar


def tilde_entropy_pair(gas: GasLaw, rho, m, nodes: int = DEFAULT_NODES):
    """(eta_tilde, q_tilde) at conserved states (rho, m)."""
    rho, m, scalar = _as_arrays(rho, m)
    u = velocity(rho, m, dry_threshold=np.finfo(float).tiny)
    eta, q = _power_entropy_pair(gas, rho, np.atleast_1d(u), nodes)
    if scalar:
        return float(eta[0]), float(q[0])
    return eta, q


def tilde_eta(gas: GasLaw, constants: EntropyConstants, rho, m, nodes: int = DEFAULT_NODES):
    """Return (eta_tilde, A) with eta_tilde = C1 rho^(gamma+1) + C2 m^2 + A."""
    rho, m, scalar = _as_arrays(rho, m)
    eta, _ = tilde_entropy_pair(gas, rho, m, nodes)
    A = eta - constants.C1 * rho ** (gas.gamma + 1.0) - constants.C2 * m * m
    if scalar:
        return float(eta[0]), float(A[0])
    return eta, A


@dataclass(frozen=True)
class RemainderReport:
    A: float
    A_m: float
    A_m_times_m: float
    tol: float
    nonnegative: bool
    growth: bool

    @property
    def holds(self) -> bool:
        return self.nonnegative and self.growth


def check_remainder(gas: GasLaw, constants: EntropyConstants, rho: float, u: float,
                    h: float = 1e-4) -> RemainderReport:
    """Check A >= 0 and A_m m >= 3A at (rho, rho u), with A_m by central difference."""
    if not rho > 0:
        raise DomainError("need rho > 0")
    m = rho * u
    eta, A = tilde_eta(gas, constants, rho, m)
    _, a_plus = tilde_eta(gas, constants, rho, m + h)
    _, a_minus = tilde_eta(gas, constants, rho, m - h)
    a_m = (a_plus - a_minus) / (2.0 * h)
    tol = max(1e-8, 10.0 * h * h * max(1.0, abs(eta)))
    return RemainderReport(A, a_m, a_m * m, tol, A >= -tol, a_m * m >= 3.0 * A - tol)


def relative_entropy(gas: GasLaw, constants: EntropyConstants, rho, m, rho_bar):
    """eta_tilde minus its linearization in rho around rho_bar."""
    rho_bar = np.asarray(rho_bar, dtype=float)
    if np.any(rho_bar < 0):
        raise DomainError("negative reference density")
    eta, _ = tilde_eta(gas, constants, rho, m)
    g = gas.gamma
    out = (eta - constants.C1 * rho_bar ** (g + 1.0)
           - constants.C1 * (g + 1.0) * rho_bar ** g * (np.asarray(rho, dtype=float) - rho_bar))
    return float(out) if np.ndim(out) == 0 else out

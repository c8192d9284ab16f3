"""Bessel functions J0, J1, J2, the zeros of J1 and the mapped-frame eigenbasis.

Evaluation uses the ascending series for small arguments, Miller's downward
recurrence normalised by ``J0 + 2 sum J_2k = 1`` in the middle range and the
Hankel asymptotic expansion for large arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, NumericError
from .well import Units

SERIES_MAX = 8.0
ASYMPTOTIC_MIN = 30.0
_ORDERS = (0, 1, 2)


def _series(order: int, z: np.ndarray) -> np.ndarray:
    half = 0.5 * z
    term = half**order / math.factorial(order)
    total = term.copy()
    q = -half * half
    for k in range(1, 60):
        term = term * q / (k * (k + order))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _miller(order: int, z: np.ndarray) -> np.ndarray:
    zmax = float(np.max(z))
    start = 2 * ((int(zmax + 12.0 * zmax ** (1 / 3) + 30)) // 2)
    nxt = np.zeros_like(z)
    cur = np.full_like(z, 1e-30)
    norm = np.zeros_like(z)
    want = np.zeros_like(z)
    for k in range(start, 0, -1):
        prev = (2.0 * k / z) * cur - nxt
        nxt, cur = cur, prev
        # cur now holds the unnormalised J_{k-1}
        if k - 1 == order:
            want = cur.copy()
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * cur
        big = np.abs(cur) > 1e200
        if np.any(big):
            scale = np.where(big, 1e-200, 1.0)
            cur *= scale
            nxt *= scale
            norm *= scale
            want *= scale
    norm += cur  # J_0
    return want / norm


def _hankel(order: int, z: np.ndarray) -> np.ndarray:
    mu = 4.0 * order * order
    p = np.ones_like(z)
    q = np.zeros_like(z)
    coef = 1.0
    inv8z = 1.0 / (8.0 * z)
    power = np.ones_like(z)
    for k in range(1, 40):
        coef *= (mu - (2 * k - 1) ** 2) / k
        power = power * inv8z
        term = coef * power
        # odd k feed Q, even k feed P, with alternating signs
        if k % 2:
            q += (-1) ** ((k - 1) // 2) * term
        else:
            p += (-1) ** (k // 2) * term
        if coef == 0.0 or np.all(np.abs(term) < 1e-17):
            break
    chi = z - (0.5 * order + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * z)) * (p * np.cos(chi) - q * np.sin(chi))


def bessel_j(order: int, z):
    """J_order(z) for order in {0, 1, 2}; negative z by parity."""
    if order not in _ORDERS:
        raise DomainError(f"only orders 0, 1, 2 are provided, got {order}")
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    sign = np.where((z < 0) & (order % 2 == 1), -1.0, 1.0)
    x = np.abs(z)
    out = np.empty_like(x)
    lo = x <= SERIES_MAX
    hi = x > ASYMPTOTIC_MIN
    mid = ~(lo | hi)
    if np.any(lo):
        out[lo] = _series(order, x[lo])
    if np.any(mid):
        out[mid] = _miller(order, x[mid])
    if np.any(hi):
        out[hi] = _hankel(order, x[hi])
    out *= sign
    return float(out[0]) if scalar else out


def bessel_j1_prime(z):
    """Derivative of J1: J0(z) - J1(z)/z (1/2 at z = 0)."""
    z = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = bessel_j(0, z) - np.where(z == 0, 0.0, bessel_j(1, z) / np.where(z == 0, 1.0, z))
    val = np.where(z == 0, 0.5, val)
    return float(val) if val.ndim == 0 else val


@dataclass(frozen=True)
class BesselZero:
    n: int
    z: float

    @property
    def u(self) -> float:
        """z_n / (pi n), close to 1."""
        return self.z / (math.pi * self.n)


def _mcmahon(n: int) -> float:
    beta = (n + 0.25) * math.pi
    return beta - 3.0 / (8.0 * beta) + 3.0 / (128.0 * beta**3)


@lru_cache(maxsize=None)
def bessel_j1_zero(n: int) -> BesselZero:
    """n-th positive zero of J1, bracketed around the McMahon guess and Newton-polished."""
    if n < 1:
        raise DomainError(f"zero index must be >= 1, got {n}")
    guess = _mcmahon(n)
    lo, hi = guess - 0.5, guess + 0.5
    flo = bessel_j(1, lo)
    if flo * bessel_j(1, hi) > 0:
        raise NumericError(f"J1 zero {n} not bracketed near {guess}")
    z = guess
    for _ in range(100):
        f = bessel_j(1, z)
        if abs(f) < 1e-15:
            break
        step = f / bessel_j1_prime(z)
        znew = z - step
        if not lo < znew < hi:
            znew = 0.5 * (lo + hi)
        if (f < 0) == (flo < 0):
            lo = z
        else:
            hi = z
        if abs(znew - z) < 1e-15 * z:
            z = znew
            break
        z = znew
    else:
        raise NumericError(f"Newton iteration for J1 zero {n} did not converge")
    if abs(bessel_j(1, z)) >= 1e-12:
        raise NumericError(f"J1 zero {n} residual too large")
    return BesselZero(n, z)


def mapped_eigenfunction(n: int, y, width: float = 1.0):
    """sqrt(2)/(b |J2(z_n)|) sqrt(y) J1(y z_n / b) on [0, b], zero outside."""
    if width <= 0:
        raise DomainError("width must be positive")
    zn = bessel_j1_zero(n).z
    y = np.asarray(y, dtype=float)
    inside = (y >= 0) & (y <= width)
    yy = np.where(inside, y, 0.0)
    norm = math.sqrt(2.0) / (width * abs(bessel_j(2, zn)))
    out = np.where(inside, norm * np.sqrt(yy) * bessel_j(1, yy * zn / width), 0.0)
    return float(out) if out.ndim == 0 else out


def mapped_eigenfunction_derivative(n: int, y, width: float = 1.0):
    """d/dy of :func:`mapped_eigenfunction` for 0 < y <= b."""
    zn = bessel_j1_zero(n).z
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0) or np.any(y > width):
        raise DomainError("derivative is evaluated on (0, b]")
    norm = math.sqrt(2.0) / (width * abs(bessel_j(2, zn)))
    arg = y * zn / width
    out = norm * (bessel_j(1, arg) / (2.0 * np.sqrt(y)) + np.sqrt(y) * (zn / width) * bessel_j1_prime(arg))
    return float(out) if np.ndim(out) == 0 else out


def mapped_eigen_energy(n: int, width: float = 1.0, units: Units = Units()) -> float:
    """E_n^w = (pi n hbar)^2 u_n^2 / (2 m b^2) = (hbar z_n)^2 / (2 m b^2)."""
    if n < 1:
        raise DomainError(f"quantum number must be >= 1, got {n}")
    zn = bessel_j1_zero(n).z
    return (units.hbar * zn) ** 2 / (2.0 * units.mass * width**2)


@dataclass(frozen=True)
class MappedEigenState:
    n: int
    width: float = 1.0
    units: Units = Units()

    @property
    def zero(self) -> BesselZero:
        return bessel_j1_zero(self.n)

    @property
    def energy_w(self) -> float:
        return mapped_eigen_energy(self.n, self.width, self.units)

    def __call__(self, y):
        return mapped_eigenfunction(self.n, y, self.width)

"""Rescaled frame y = (x - a)/alpha(t), tau = int dt/alpha^2 that freezes the well.

Two perturbative couplings live here:

* the operator ``V`` written in terms of alpha-derivatives, sandwiched between
  the Bessel eigenstates chi_n^w with d/dtau acting on their phase
  (:func:`perturbation_matrix_element`, ``operator="bessel"``);
* the dilation coupling ``i hbar alpha alpha_dot (y d/dy + 1/2)`` that the
  exact Schrodinger equation acquires in this frame when psi is scaled by
  alpha^(-1/2) (``operator="dilation"``).  This is the coupling that
  :func:`movingwell.tdse.evolve_mapped` integrates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np
from scipy import integrate, special

from .bessel import mapped_eigen_energy, mapped_eigenfunction, mapped_eigenfunction_derivative
from .errors import DomainError, NumericError
from .well import MotionLaw, Units, alpha_at, eigen_energy, WellGeometry

QUAD_NODES = 2000
QUAD_TOL = 1e-8


def _segments(law: MotionLaw):
    """Knot times, alphas, slopes and knot taus of the piecewise-linear law."""
    ts, al = law.knots
    slopes = np.diff(al) / np.diff(ts)
    taus = np.zeros_like(ts)
    taus[1:] = np.cumsum(np.diff(ts) / (al[:-1] * al[1:]))
    return ts, al, slopes, taus


def tau_of_t(law: MotionLaw, t):
    """Scaled time tau(t) = int_0^t dt'/alpha(t')^2.

    On every linear piece tau - tau_0 = (t - t_0)/(alpha_0 alpha(t)); for the
    linear law this is tau = t/alpha(t) = (1 - 1/alpha)/alpha'.
    """
    t = law._check_t(t)
    if law.kind == "linear":
        out = t / (1.0 + law.alpha_prime * t)
    else:
        ts, al, slopes, taus = _segments(law)
        i = np.clip(np.searchsorted(ts, t, side="right") - 1, 0, len(slopes) - 1)
        a_t = al[i] + slopes[i] * (t - ts[i])
        out = taus[i] + (t - ts[i]) / (al[i] * a_t)
    return out if np.ndim(out) else float(out)


def tau_of_t_numeric(law: MotionLaw, t: float) -> float:
    """tau(t) by adaptive quadrature of 1/alpha^2 (independent of the closed form)."""
    t = float(law._check_t(t))
    if t == 0.0:
        return 0.0
    ts, _ = law.knots
    pts = [p for p in ts[1:-1] if 0 < p < t]
    val, err = integrate.quad(lambda s: 1.0 / alpha_at(law, s) ** 2, 0.0, t,
                              points=pts or None, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def tau_final(law: MotionLaw) -> float:
    return tau_of_t(law, law.duration_T)


def alpha_of_tau(law: MotionLaw, tau):
    """Inverse of :func:`tau_of_t` expressed as alpha; alpha = 1/(1 - alpha' tau) per piece."""
    tau = np.asarray(tau, dtype=float)
    tmax = tau_final(law)
    if np.any(tau < -1e-12 * tmax) or np.any(tau > tmax * (1 + 1e-12)):
        raise DomainError(f"tau must lie in [0, {tmax}]")
    tau = np.clip(tau, 0.0, tmax)
    ts, al, slopes, taus = _segments(law)
    i = np.clip(np.searchsorted(taus, tau, side="right") - 1, 0, len(slopes) - 1)
    denom = 1.0 / al[i] - slopes[i] * (tau - taus[i])
    if np.any(denom <= 0):
        raise DomainError("tau at or beyond the pole of alpha(tau)")
    out = 1.0 / denom
    return out if np.ndim(out) else float(out)


def t_of_tau(law: MotionLaw, tau):
    """Lab time at scaled time tau."""
    tau = np.asarray(tau, dtype=float)
    a = alpha_of_tau(law, tau)
    ts, al, slopes, taus = _segments(law)
    tmax = tau_final(law)
    i = np.clip(np.searchsorted(taus, np.clip(tau, 0, tmax), side="right") - 1, 0, len(slopes) - 1)
    out = ts[i] + (np.clip(tau, 0, tmax) - taus[i]) * al[i] * a
    out = np.minimum(out, law.duration_T)
    return out if np.ndim(out) else float(out)


def dilation_rate(law: MotionLaw, tau):
    """alpha * d alpha/dt at scaled time tau: the strength of the dilation coupling."""
    t = t_of_tau(law, tau)
    return alpha_of_tau(law, tau) * law.velocity(t)


@dataclass(frozen=True)
class MappedTime:
    t: float
    tau: float
    law: MotionLaw

    @classmethod
    def at(cls, law: MotionLaw, t: float) -> "MappedTime":
        return cls(float(t), tau_of_t(law, t), law)

    @property
    def alpha(self) -> float:
        return alpha_at(self.law, self.t)


# -- Bessel-basis operator -----------------------------------------------------

@lru_cache(maxsize=8)
def gauss_legendre_rule(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    return special.roots_legendre(nodes)


@lru_cache(maxsize=16)
def _panel_rules(width: float, nodes: int):
    """Nodes/weights of one panel on [0, b] and of two panels on its halves."""
    x, w = gauss_legendre_rule(nodes)
    full = (0.5 * width * (x + 1.0), 0.5 * width * w)
    halves = (np.concatenate([0.25 * width * (x + 1.0), 0.25 * width * (x + 3.0)]),
              np.concatenate([0.25 * width * w, 0.25 * width * w]))
    return full, halves


@lru_cache(maxsize=256)
def _tabulated_basis(n: int, width: float, nodes: int):
    out = []
    for y, _ in _panel_rules(width, nodes):
        out.append((mapped_eigenfunction(n, y, width), mapped_eigenfunction_derivative(n, y, width), y))
    return out


def _checked_pair_integral(m, n, width, nodes, kind):
    """Two-panel Gauss-Legendre estimate, checked against one panel; quad fallback."""
    rules = _panel_rules(width, nodes)
    estimates = []
    for (y, w), (chi_m, _, _), (chi_n, dchi_n, _) in zip(
            rules, _tabulated_basis(m, width, nodes), _tabulated_basis(n, width, nodes)):
        f = chi_m * chi_n / y**2 if kind == "inv_sq" else chi_m * dchi_n / y
        estimates.append(float(np.dot(w, f)))
    full, halves = estimates
    if abs(full - halves) <= QUAD_TOL * max(1.0, abs(halves)):
        return halves
    if kind == "inv_sq":
        def f(y):
            return mapped_eigenfunction(m, y, width) * mapped_eigenfunction(n, y, width) / y**2
    else:
        def f(y):
            return mapped_eigenfunction(m, y, width) * mapped_eigenfunction_derivative(n, y, width) / y
    val, err = integrate.quad(f, 0.0, width, limit=1000, epsabs=1e-12, epsrel=1e-12)
    if err > QUAD_TOL * max(1.0, abs(val)):
        raise NumericError(f"Bessel-product quadrature error estimate {err:.2e}")
    return val


@lru_cache(maxsize=4096)
def bessel_integrals(m: int, n: int, width: float = 1.0, nodes: int = QUAD_NODES) -> tuple[float, float]:
    """(int chi_m chi_n / y^2 dy, int chi_m chi_n' / y dy) over [0, b]."""
    return (_checked_pair_integral(m, n, width, nodes, "inv_sq"),
            _checked_pair_integral(m, n, width, nodes, "mixed"))


@dataclass(frozen=True)
class PerturbationElement:
    """<chi_m | V | chi_n> split by derivative order in tau."""

    n: int
    m: int
    second: complex
    first: complex
    mixed: complex

    @property
    def value(self) -> complex:
        return self.second + self.first + self.mixed


def perturbation_terms(n: int, m: int, alpha: float, alpha_prime: float, basis_width: float = 1.0,
                       units: Units = Units(), nodes: int = QUAD_NODES) -> PerturbationElement:
    """Matrix element of
    V = -hbar^2/(2 m y^2) [ d_tau^2/(alpha alpha')^2 - 2 d_tau/(alpha alpha') + 2 y d_y d_tau/(alpha alpha') ]
    with d_tau -> -i E_n^w/hbar acting on the phase of chi_n.
    """
    if n < 1 or m < 1:
        raise DomainError("state indices must be >= 1")
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    if alpha_prime == 0:
        raise DomainError("the operator is singular for a static wall (alpha' = 0)")
    hbar, mass = units.hbar, units.mass
    e_n = mapped_eigen_energy(n, basis_width, units)
    inv_sq, mixed_int = bessel_integrals(m, n, float(basis_width), nodes)
    aa = alpha * alpha_prime
    pre = -hbar**2 / (2.0 * mass)
    d_tau = -1j * e_n / hbar
    return PerturbationElement(
        n=n, m=m,
        second=pre * d_tau**2 / aa**2 * inv_sq,
        first=pre * (-2.0 / aa) * d_tau * inv_sq,
        mixed=pre * (2.0 / aa) * d_tau * mixed_int,
    )


def perturbation_matrix_element(n: int, m: int, alpha: float, alpha_prime: float,
                                basis_width: float = 1.0, units: Units = Units(),
                                nodes: int = QUAD_NODES) -> complex:
    return perturbation_terms(n, m, alpha, alpha_prime, basis_width, units, nodes).value


def expansion_parameter(n: int, m: int, alpha: float, alpha_prime: float, width: float = 1.0,
                        units: Units = Units()) -> float:
    """delta = (E_n^w - E_m^w) / (hbar alpha alpha')."""
    if n == m:
        raise DomainError("delta is defined between distinct levels")
    if alpha_prime == 0 or not alpha > 0:
        raise DomainError("need alpha > 0 and alpha' != 0")
    de = mapped_eigen_energy(n, width, units) - mapped_eigen_energy(m, width, units)
    return de / (units.hbar * alpha * alpha_prime)


# -- dilation coupling -----------------------------------------------------------

def dilation_matrix_element(m: int, n: int) -> float:
    """<s_m | y d/dy + 1/2 | s_n> in the sine basis of any fixed width."""
    if m < 1 or n < 1:
        raise DomainError("state indices must be >= 1")
    if m == n:
        return 0.0
    return (-1.0) ** (m + n + 1) * 2.0 * m * n / (m * m - n * n)


def _oscillatory(f, lo, hi, omega, breakpoints=()):
    """int_lo^hi f(tau) exp(i omega tau) dtau for real f, piecewise smooth."""
    edges = [lo, *[p for p in breakpoints if lo < p < hi], hi]
    re = im = 0.0
    err = 0.0
    for a, b in zip(edges, edges[1:]):
        if omega == 0:
            r, e1 = integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-11, limit=500)
            i, e2 = 0.0, 0.0
        else:
            r, e1 = integrate.quad(f, a, b, weight="cos", wvar=omega, epsabs=1e-13, epsrel=1e-11, limit=500)
            i, e2 = integrate.quad(f, a, b, weight="sin", wvar=omega, epsabs=1e-13, epsrel=1e-11, limit=500)
        re += r
        im += i
        err += e1 + e2
    val = complex(re, im)
    if err > 1e-7 * max(abs(val), 1e-12) and err > 1e-12:
        raise NumericError(f"tau quadrature did not converge (error estimate {err:.2e})")
    return val


def first_order_amplitude(n_initial: int, m_final: int, law: MotionLaw, units: Units = Units(),
                          width: float = 1.0,
                          operator: Literal["dilation", "bessel"] = "dilation") -> complex:
    """First-order transition amplitude n -> m accumulated over the wall motion.

    ``operator="dilation"`` integrates the exact coupling of the rescaled frame,
    c_m = <s_m|y d/dy + 1/2|s_n> int alpha alpha_dot exp(i w_mn tau) dtau,
    with the plain-well level spacing w_mn.  ``operator="bessel"`` integrates
    (i/hbar) <chi_m|V|chi_n>(tau) exp(i (E_m^w - E_n^w) tau/hbar) in the Bessel basis.
    """
    if n_initial == m_final:
        raise DomainError("first-order amplitude is defined for n != m")
    tau_end = tau_final(law)
    _, _, slopes, knot_taus = _segments(law)
    bps = tuple(knot_taus[1:-1])
    if operator == "dilation":
        geom = WellGeometry(0.0, width)
        omega = (eigen_energy(m_final, geom, units) - eigen_energy(n_initial, geom, units)) / units.hbar
        integral = _oscillatory(lambda s: float(dilation_rate(law, s)), 0.0, tau_end, omega, bps)
        return dilation_matrix_element(m_final, n_initial) * integral
    if operator == "bessel":
        if np.any(slopes == 0):
            raise DomainError("the Bessel-basis operator is singular where the wall is at rest")
        omega = (mapped_eigen_energy(m_final, width, units)
                 - mapped_eigen_energy(n_initial, width, units)) / units.hbar
        unit = perturbation_terms(n_initial, m_final, 1.0, 1.0, width, units)

        def velocity(s):
            return float(law.velocity(t_of_tau(law, s)))

        g2 = _oscillatory(lambda s: 1.0 / (alpha_of_tau(law, s) * velocity(s)) ** 2, 0.0, tau_end, omega, bps)
        g1 = _oscillatory(lambda s: 1.0 / (alpha_of_tau(law, s) * velocity(s)), 0.0, tau_end, omega, bps)
        return (1j / units.hbar) * (unit.second * g2 + (unit.first + unit.mixed) * g1)
    raise DomainError(f"unknown operator {operator!r}")

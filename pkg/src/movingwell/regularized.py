"""Finite-height well: the infinite walls replaced by a step of height V.

Bound levels of a well of width w solve  k w = j pi - 2 arcsin(k / k0)
(k0 = sqrt(2 m V)/hbar, j = 1, 2, ...), which merges the usual even and odd
conditions into one monotone equation per level.  The continuum is never
built explicitly: the probability it receives after a sudden change of the
well is measured as the deficit of the bound-state sum.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import optimize, special

from .errors import DomainError, NumericError
from .well import Units, WellGeometry, eigen_energy

PADDING_DECAY_LENGTHS = 10.0
_GL_ORDER = 24


@dataclass(frozen=True)
class RegularizedWell:
    """Potential 0 on [left_edge, left_edge + width] and ``height_V`` elsewhere.

    With ``strict`` the height must exceed 10x the infinite-well ground energy;
    below 100x a warning is issued.
    """

    height_V: float
    width: float = 1.0
    left_edge: float = 0.0
    units: Units = Units()
    strict: bool = True

    def __post_init__(self):
        if not self.height_V > 0:
            raise DomainError(f"well height must be positive, got {self.height_V}")
        if not self.width > 0:
            raise DomainError(f"well width must be positive, got {self.width}")
        if self.strict:
            ratio = self.height_V / eigen_energy(1, self.geometry, self.units)
            if ratio < 10:
                raise DomainError(f"V is only {ratio:.3g} x E_1; the walls are not high")
            if ratio < 100:
                warnings.warn(f"V is only {ratio:.3g} x E_1", RuntimeWarning, stacklevel=3)

    @property
    def geometry(self) -> WellGeometry:
        return WellGeometry(self.left_edge, self.width)

    @property
    def k0(self) -> float:
        return math.sqrt(2.0 * self.units.mass * self.height_V) / self.units.hbar


@dataclass(frozen=True)
class BoundLevel:
    n: int
    energy: float
    k: float
    kappa: float
    height_V: float

    @property
    def xi(self) -> float:
        """E_n / V."""
        return self.energy / self.height_V

    @property
    def parity(self) -> Literal["even", "odd"]:
        return "even" if self.n % 2 else "odd"

    @property
    def phase(self) -> float:
        """Interior phase theta: psi = A sin(k (x - a) + theta) inside."""
        return math.asin(min(self.k / math.hypot(self.k, self.kappa), 1.0))


def count_bound_states(well: RegularizedWell) -> int:
    """1 + floor(sqrt(2 m V) w / (pi hbar))."""
    return 1 + int(math.floor(well.k0 * well.width / math.pi))


def bound_levels(well: RegularizedWell) -> list[BoundLevel]:
    k0, w = well.k0, well.width
    hbar, mass = well.units.hbar, well.units.mass
    expected = count_bound_states(well)

    def f(k, j):
        return k * w + 2.0 * math.asin(min(k / k0, 1.0)) - j * math.pi

    levels = []
    for j in range(1, expected + 1):
        if f(k0, j) < 0:
            break
        if f(k0, j) == 0:
            k = k0
        else:
            k = optimize.brentq(f, 0.0, k0, args=(j,), xtol=1e-15 * k0, rtol=4 * np.finfo(float).eps,
                                maxiter=200)
        if abs(f(k, j)) > 1e-12 * max(1.0, j * math.pi):
            raise NumericError(f"bound level {j} residual {f(k, j):.2e}")
        kappa = math.sqrt(max(k0 * k0 - k * k, 0.0))
        levels.append(BoundLevel(j, (hbar * k) ** 2 / (2.0 * mass), k, kappa, well.height_V))
    if len(levels) != expected:
        raise NumericError(f"found {len(levels)} bound levels, expected {expected}")
    return levels


def _amplitude(level: BoundLevel, well: RegularizedWell) -> float:
    k, kappa, w = level.k, level.kappa, well.width
    th = level.phase
    inner = 0.5 * w - (math.sin(2.0 * (k * w + th)) - math.sin(2.0 * th)) / (4.0 * k)
    tails = (math.sin(th) ** 2 + math.sin(k * w + th) ** 2) / (2.0 * kappa)
    return 1.0 / math.sqrt(inner + tails)


def bound_wavefunction_value(level: BoundLevel, well: RegularizedWell, x):
    """Normalised bound eigenfunction (sine inside, exponential tails outside)."""
    x = np.asarray(x, dtype=float)
    a, w = well.left_edge, well.width
    k, kappa, th = level.k, level.kappa, level.phase
    amp = _amplitude(level, well)
    s = x - a
    inside = amp * np.sin(k * np.clip(s, 0.0, w) + th)
    left = amp * math.sin(th) * np.exp(kappa * np.minimum(s, 0.0))
    right = amp * math.sin(k * w + th) * np.exp(-kappa * np.maximum(s - w, 0.0))
    out = np.where(s < 0, left, np.where(s > w, right, inside))
    return float(out) if out.ndim == 0 else out


def _quadrature_grid(edges, wavenumber):
    """Composite Gauss-Legendre nodes with panels no longer than a quarter wavelength."""
    x, wts = special.roots_legendre(_GL_ORDER)
    xs, ws = [], []
    for lo, hi in zip(edges, edges[1:]):
        if hi <= lo:
            continue
        panels = max(1, int(math.ceil((hi - lo) * wavenumber / (0.5 * math.pi))))
        b = np.linspace(lo, hi, panels + 1)
        mid = 0.5 * (b[1:] + b[:-1])[:, None]
        half = 0.5 * (b[1:] - b[:-1])[:, None]
        xs.append((mid + half * x).ravel())
        ws.append((half * wts).ravel())
    return np.concatenate(xs), np.concatenate(ws)


def bound_overlaps(n_initial: int, well_i: RegularizedWell, well_f: RegularizedWell,
                   padding: float = PADDING_DECAY_LENGTHS) -> np.ndarray:
    """<phi_k^f | phi_n^i> for every bound level k of ``well_f``."""
    if well_i.height_V != well_f.height_V:
        raise DomainError("both wells must share the same height V")
    levels_i = bound_levels(well_i)
    if not 1 <= n_initial <= len(levels_i):
        raise DomainError(f"initial well has {len(levels_i)} bound levels, asked for {n_initial}")
    start = levels_i[n_initial - 1]
    levels_f = bound_levels(well_f)
    pad = padding / start.kappa
    inner = sorted({well_i.left_edge, well_i.left_edge + well_i.width,
                    well_f.left_edge, well_f.left_edge + well_f.width})
    edges = [inner[0] - pad, *inner, inner[-1] + pad]
    x, w = _quadrature_grid(edges, max(well_i.k0, well_f.k0))
    psi = bound_wavefunction_value(start, well_i, x) * w
    return np.array([np.dot(bound_wavefunction_value(lv, well_f, x), psi) for lv in levels_f])


def bound_overlap_sum(n_initial: int, well_i: RegularizedWell, well_f: RegularizedWell,
                      padding: float = PADDING_DECAY_LENGTHS) -> float:
    """Probability of landing in any bound state of ``well_f``; 1 minus this is the continuum share."""
    return float(np.sum(bound_overlaps(n_initial, well_i, well_f, padding) ** 2))

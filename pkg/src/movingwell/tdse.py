"""Crank-Nicolson evolution of a particle in a well whose width follows a motion law.

Two solvers are provided.

``evolve_mapped`` works in the rescaled coordinate y = (x - a)/alpha(t) with
psi(x, t) = alpha^(-1/2) phi(y, tau) and tau = int dt/alpha^2.  The walls then sit
at y = 0 and y = b for all times and phi obeys

    i hbar d phi/d tau = -hbar^2/(2m) phi'' + i hbar alpha alpha_dot (y phi' + phi/2),

an infinite well with a Hermitian dilation coupling.  Final-well eigenstates are
plain sines in y, so the transition table is read off directly.

``evolve_lab`` integrates the laboratory-frame equation with walls of finite
height V whose right edge moves; it also reports the probability left outside
the bound states of the final well (leakage into the continuum).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import _cn
from .errors import ConfigurationError, NumericError
from .mapped import dilation_rate, t_of_tau, tau_final, tau_of_t, alpha_of_tau
from .well import MotionLaw, Units, WellGeometry, alpha_at, eigen_energy, eigenfunction_value

DEFAULT_GRID_N = 2048
MIN_GRID_N = 256
STEP_ENERGY_PRODUCT = 0.05
MAX_STEP_ENERGY_PRODUCT = 0.1
NORM_TOL = 1e-6
LAB_PADDING_DECAY_LENGTHS = 10.0
MIN_LAB_PADDING_DECAY_LENGTHS = 5.0


@dataclass(frozen=True)
class GridState:
    """Complex samples on a uniform grid including the two (zero) boundary points."""

    samples: np.ndarray
    spacing: float
    domain: tuple[float, float]
    time: float

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.domain[0], self.domain[1], self.samples.size)

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.spacing)

    def project(self, values: np.ndarray) -> complex:
        """<f | psi> for a real function sampled on the same grid."""
        return complex(np.dot(values, self.samples) * self.spacing)


@dataclass(frozen=True)
class EvolutionReport:
    frame: str
    initial_index: int
    final_state: GridState
    W_table: np.ndarray
    norm_drift: float
    step_count: int
    step: float
    series: dict = field(default_factory=dict)
    bound_total: Optional[float] = None

    @property
    def residual(self) -> float:
        """1 - sum of the tabulated probabilities."""
        return 1.0 - float(np.sum(self.W_table))

    @property
    def continuum(self) -> Optional[float]:
        """Lab frame only: probability outside every bound state of the final well."""
        return None if self.bound_total is None else 1.0 - self.bound_total


@dataclass(frozen=True)
class TransitionTable:
    probabilities: np.ndarray
    residual: float


def transition_table(report: EvolutionReport, target_geometry: WellGeometry, k_max: int) -> TransitionTable:
    """|<k_f | psi(T)>|^2 for the infinite-well eigenstates of ``target_geometry``."""
    state = report.final_state
    x = state.x
    probs = np.array([abs(state.project(eigenfunction_value(k, x, target_geometry))) ** 2
                      for k in range(1, k_max + 1)])
    return TransitionTable(probs, 1.0 - float(probs.sum()))


def _retained(n: int, k_max: Optional[int]) -> int:
    return max(4 * n, 8) if k_max is None else k_max


def _check_grid(grid_N: int):
    if grid_N < MIN_GRID_N:
        raise ConfigurationError(f"grid_N must be >= {MIN_GRID_N}, got {grid_N}")


def _choose_step(step, e_max, hbar, courant_limit, total):
    """Uniform step no larger than the resolution limits, dividing ``total`` exactly."""
    limit = min(STEP_ENERGY_PRODUCT * hbar / e_max, courant_limit)
    if step is None:
        step = limit
    else:
        if step * e_max / hbar >= MAX_STEP_ENERGY_PRODUCT:
            raise ConfigurationError(
                f"step {step:.3g} does not resolve the highest retained level "
                f"(step*E_max/hbar = {step * e_max / hbar:.3g} >= {MAX_STEP_ENERGY_PRODUCT})")
        if step > 2.0 * courant_limit:
            raise ConfigurationError(f"step {step:.3g} lets the walls cross more than one grid cell")
    count = max(1, int(math.ceil(total / step - 1e-9)))
    return total / count, count


def _record_points(count: int, records: int) -> np.ndarray:
    return np.unique(np.linspace(0, count, max(2, records + 1)).round().astype(int))


def evolve_mapped(n: int, law: MotionLaw, grid_N: int = DEFAULT_GRID_N, d_tau: Optional[float] = None,
                  units: Units = Units(), geometry: WellGeometry = WellGeometry(),
                  k_max: Optional[int] = None, records: int = 100) -> EvolutionReport:
    """Evolve eigenstate ``n`` of the initial well to t = T in the rescaled frame."""
    _check_grid(grid_N)
    hbar, mass = units.hbar, units.mass
    b = geometry.width
    k_max = _retained(n, k_max)
    e_max = eigen_energy(k_max, geometry, units)
    h = b / (grid_N - 1)
    y = np.linspace(0.0, b, grid_N)[1:-1]
    tau_end = tau_final(law)

    ts, al = law.knots
    peak_rate = float(np.max(np.abs(al * law.velocity(np.minimum(ts, law.duration_T)))))
    peak_rate = max(peak_rate, float(np.max(np.abs(al[:-1] * np.diff(al) / np.diff(ts)))))
    courant = 0.5 * h / (peak_rate * b) if peak_rate > 0 else math.inf
    d_tau, count = _choose_step(d_tau, e_max, hbar, courant, tau_end)

    phi = np.sqrt(2.0 / b) * np.sin(math.pi * n * y / b) + 0j
    kin_diag = hbar**2 / (mass * h * h)
    kin_off = -hbar**2 / (2.0 * mass * h * h)
    dil_off = (y[:-1] + y[1:]) / (4.0 * h)
    rates = np.asarray(dilation_rate(law, (np.arange(count) + 0.5) * d_tau), dtype=float)
    basis_n = np.sqrt(2.0 / b) * np.sin(math.pi * n * y / b)

    marks = _record_points(count, records)
    series = {"t": [], "alpha": [], "tau": [], "W_nn": [], "norm": []}
    done = 0
    for mark in marks:
        if mark > done:
            _cn.run_mapped(phi, kin_diag, kin_off, dil_off, rates[done:mark], d_tau, hbar)
            done = mark
        tau = min(done * d_tau, tau_end)
        series["tau"].append(tau)
        series["t"].append(float(t_of_tau(law, tau)))
        series["alpha"].append(float(alpha_of_tau(law, tau)))
        series["W_nn"].append(abs(np.dot(basis_n, phi) * h) ** 2)
        series["norm"].append(float(np.sum(np.abs(phi) ** 2) * h))

    norm = float(np.sum(np.abs(phi) ** 2) * h)
    drift = abs(norm - 1.0)
    if drift > NORM_TOL:
        raise NumericError(f"norm drift {drift:.2e} exceeds {NORM_TOL}")
    ks = np.arange(1, k_max + 1)[:, None]
    basis = np.sqrt(2.0 / b) * np.sin(math.pi * ks * y[None, :] / b)
    W = np.abs(basis @ phi * h) ** 2

    alpha_T = law.alpha_final
    samples = np.concatenate([[0], phi, [0]]) / math.sqrt(alpha_T)
    final = GridState(samples, alpha_T * h, (geometry.a, geometry.a + alpha_T * b), law.duration_T)
    return EvolutionReport("mapped", n, final, W, drift, count, d_tau,
                           {k: np.asarray(v) for k, v in series.items()})


def _lab_hamiltonian(x, h, height, left, right, units):
    pot = _cn.ramp_potential(x, left, right, height, h)
    diag = units.hbar**2 / (units.mass * h * h) + pot
    off = np.full(x.size - 1, -units.hbar**2 / (2.0 * units.mass * h * h))
    return diag, off


def _normalised_eigvecs(diag, off, h, **select):
    vals, vecs = eigh_tridiagonal(diag, off, **select)
    vecs = vecs / math.sqrt(h)
    # fix the sign so that each vector starts positive near the left wall
    for j in range(vecs.shape[1]):
        i = int(np.argmax(np.abs(vecs[:, j]) > 1e-3 * np.max(np.abs(vecs[:, j]))))
        if vecs[i, j] < 0:
            vecs[:, j] *= -1
    return vals, vecs


def default_box(law: MotionLaw, V_num: float, geometry: WellGeometry = WellGeometry(),
                units: Units = Units(), padding: float = LAB_PADDING_DECAY_LENGTHS) -> tuple[float, float]:
    """Interval covering the whole wall trajectory plus ``padding`` decay lengths."""
    _, al = law.knots
    e1 = eigen_energy(1, WellGeometry(0, geometry.width * float(np.min(al))), units)
    kappa = math.sqrt(2.0 * units.mass * max(V_num - e1, 1e-300)) / units.hbar
    pad = padding / kappa
    return geometry.a - pad, geometry.a + geometry.width * float(np.max(al)) + pad


def _check_box(box, lo_edge, hi_edge, V_num, e1, units):
    kappa = math.sqrt(2.0 * units.mass * max(V_num - e1, 1e-300)) / units.hbar
    need = MIN_LAB_PADDING_DECAY_LENGTHS / kappa
    if hi_edge > box[1] or lo_edge < box[0]:
        raise ConfigurationError("the well leaves the simulation box")
    if lo_edge - box[0] < need or box[1] - hi_edge < need:
        raise ConfigurationError(
            f"box padding must be at least {MIN_LAB_PADDING_DECAY_LENGTHS} decay lengths ({need:.3g})")


def _lab_setup(n, V_num, box, grid_N, units, geometry, lo_edge, hi_edge):
    _check_grid(grid_N)
    e1 = eigen_energy(1, geometry, units)
    if V_num < 1e3 * e1:
        raise ConfigurationError(f"V_num must be >= 1e3 E_1 = {1e3 * e1:.4g}")
    _check_box(box, lo_edge, hi_edge, V_num, e1, units)
    x = np.linspace(box[0], box[1], grid_N)
    h = x[1] - x[0]
    xi = x[1:-1]
    diag, off = _lab_hamiltonian(xi, h, V_num, geometry.a, geometry.right, units)
    _, vec = _normalised_eigvecs(diag, off, h, select="i", select_range=(n - 1, n - 1))
    return x, h, xi, vec[:, 0].astype(complex)


def _lab_report(psi, x, h, xi, n, V_num, final_geometry, units, k_max, count, step, series, T):
    norm = float(np.sum(np.abs(psi) ** 2) * h)
    drift = abs(norm - 1.0)
    if drift > NORM_TOL:
        raise NumericError(f"norm drift {drift:.2e} exceeds {NORM_TOL}")
    diag, off = _lab_hamiltonian(xi, h, V_num, final_geometry.a, final_geometry.right, units)
    _, vecs = _normalised_eigvecs(diag, off, h, select="v", select_range=(-np.inf, V_num))
    bound = np.abs(vecs.T @ psi * h) ** 2
    W = np.zeros(k_max)
    W[:min(k_max, bound.size)] = bound[:k_max]
    final = GridState(np.concatenate([[0], psi, [0]]), h, (x[0], x[-1]), T)
    return EvolutionReport("lab", n, final, W, drift, count, step,
                           {k: np.asarray(v) for k, v in series.items()}, float(bound.sum()))


def evolve_lab(n: int, law: MotionLaw, V_num: float, box: Optional[tuple[float, float]] = None,
               grid_N: int = DEFAULT_GRID_N, dt: Optional[float] = None, units: Units = Units(),
               geometry: WellGeometry = WellGeometry(), k_max: Optional[int] = None,
               records: int = 50) -> EvolutionReport:
    """Evolve bound state ``n`` of the finite well of height ``V_num`` while its right wall moves."""
    if box is None:
        box = default_box(law, V_num, geometry, units)
    _, al = law.knots
    lo_edge = geometry.a
    hi_edge = geometry.a + geometry.width * float(np.max(al))
    x, h, xi, psi = _lab_setup(n, V_num, box, grid_N, units, geometry, lo_edge, hi_edge)
    k_max = _retained(n, k_max)
    e_max = eigen_energy(k_max, geometry, units)
    ts, _ = law.knots
    speed = geometry.width * float(np.max(np.abs(np.diff(al) / np.diff(ts))))
    courant = 0.5 * h / speed if speed > 0 else math.inf
    dt, count = _choose_step(dt, e_max, units.hbar, courant, law.duration_T)
    t_mid = np.minimum((np.arange(count) + 0.5) * dt, law.duration_T)
    rights = geometry.a + geometry.width * np.asarray(alpha_at(law, t_mid), dtype=float)

    kin_diag = units.hbar**2 / (units.mass * h * h)
    kin_off = -units.hbar**2 / (2.0 * units.mass * h * h)
    series = {"t": [], "alpha": [], "tau": [], "W_nn": [], "norm": []}
    done = 0
    for mark in _record_points(count, records):
        if mark > done:
            _cn.run_lab(psi, xi, kin_diag, kin_off, V_num, geometry.a, rights[done:mark], h, dt, units.hbar)
            done = mark
        t = min(done * dt, law.duration_T)
        alpha = float(alpha_at(law, t))
        diag, off = _lab_hamiltonian(xi, h, V_num, geometry.a, geometry.a + geometry.width * alpha, units)
        _, vec = _normalised_eigvecs(diag, off, h, select="i", select_range=(n - 1, n - 1))
        series["t"].append(t)
        series["alpha"].append(alpha)
        series["tau"].append(float(tau_of_t(law, t)))
        series["W_nn"].append(abs(np.dot(vec[:, 0], psi) * h) ** 2)
        series["norm"].append(float(np.sum(np.abs(psi) ** 2) * h))
    final_geometry = WellGeometry(geometry.a, geometry.width * law.alpha_final)
    return _lab_report(psi, x, h, xi, n, V_num, final_geometry, units, k_max, count, dt, series,
                       law.duration_T)


def evolve_lab_sudden(n: int, geometry_i: WellGeometry, geometry_f: WellGeometry, V_num: float,
                      box: Optional[tuple[float, float]] = None, grid_N: int = DEFAULT_GRID_N,
                      units: Units = Units(), k_max: Optional[int] = None) -> EvolutionReport:
    """Instantaneous swap of the finite-well potential: project the initial bound state."""
    lo_edge = min(geometry_i.a, geometry_f.a)
    hi_edge = max(geometry_i.right, geometry_f.right)
    if box is None:
        e1 = eigen_energy(1, geometry_i, units)
        kappa = math.sqrt(2.0 * units.mass * (V_num - e1)) / units.hbar
        pad = LAB_PADDING_DECAY_LENGTHS / kappa
        box = (lo_edge - pad, hi_edge + pad)
    x, h, xi, psi = _lab_setup(n, V_num, box, grid_N, units, geometry_i, lo_edge, hi_edge)
    return _lab_report(psi, x, h, xi, n, V_num, geometry_f, units, _retained(n, k_max), 0, 0.0, {}, 0.0)


@dataclass(frozen=True)
class ConvergenceTable:
    grid_N: list
    steps: list
    values: list
    norm_drifts: list

    @property
    def differences(self) -> list:
        return [abs(a - b) for a, b in zip(self.values, self.values[1:])]

    @property
    def error_ratios(self) -> list:
        d = self.differences
        return [a / b if b > 0 else math.inf for a, b in zip(d, d[1:])]

    @property
    def observed_orders(self) -> list:
        return [math.log2(r) if 0 < r < math.inf else math.nan for r in self.error_ratios]

    @property
    def extrapolated(self) -> float:
        """Richardson extrapolation of the finest two levels assuming second order."""
        return self.values[-1] + (self.values[-1] - self.values[-2]) / 3.0


def convergence_sweep(solver: Callable[..., EvolutionReport], base_N: int, base_step: float, levels: int = 3,
                      quantity: Optional[Callable[[EvolutionReport], float]] = None, **kwargs) -> ConvergenceTable:
    """Rerun ``solver`` with the grid spacing and time step halved ``levels - 1`` times.

    ``solver`` is :func:`evolve_mapped` or :func:`evolve_lab`; ``quantity`` defaults
    to the survival probability W_nn.
    """
    step_name = "d_tau" if solver is evolve_mapped else "dt"
    if quantity is None:
        def quantity(r):
            return float(r.W_table[r.initial_index - 1])
    Ns, steps, vals, drifts = [], [], [], []
    for j in range(levels):
        N = (base_N - 1) * 2**j + 1
        step = base_step / 2**j
        rep = solver(grid_N=N, **{step_name: step}, **kwargs)
        Ns.append(N)
        steps.append(rep.step)
        vals.append(quantity(rep))
        drifts.append(rep.norm_drift)
    return ConvergenceTable(Ns, steps, vals, drifts)

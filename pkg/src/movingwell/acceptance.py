"""Acceptance checks shared by the test suite and ``movingwell selftest``.

Each check returns a :class:`CriterionResult`; none of them raise on a failed
tolerance, so a report can list every criterion regardless of earlier ones.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from .bessel import bessel_j1_zero, mapped_eigen_energy
from .mapped import first_order_amplitude, tau_of_t, tau_of_t_numeric
from .regularized import RegularizedWell, bound_overlap_sum
from .sudden import overlap_amplitude, shrinking_amplitude, total_probability_closed_form, total_probability_sum
from .tdse import convergence_sweep, evolve_mapped
from .well import MotionLaw, Units, WellGeometry

LEVEL_TIME = 1.0 / (math.pi**2 / 2.0)  # hbar/E_1 for the unit well in natural units
REFERENCE_OFFSETS = {  # u_n - 1 and one unit of the last quoted digit
    1: (0.22, 1e-2), 2: (0.116, 1e-3), 3: (0.08, 1e-2)}


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.2f} s)"


def _timed(number: int, name: str, fn: Callable[[], tuple[bool, str]]) -> CriterionResult:
    start = time.perf_counter()
    passed, detail = fn()
    return CriterionResult(number, name, bool(passed), detail, time.perf_counter() - start)


def sum_rule_shrinking(k_max: int = 10_000, tol: float = 1e-6) -> CriterionResult:
    def run():
        worst = 0.0
        for n in (1, 2, 3):
            for alpha in (0.25, 0.5, 0.75):
                s = total_probability_sum(n, WellGeometry(), WellGeometry(0.0, alpha), k_max)
                worst = max(worst, abs(s - total_probability_closed_form(n, alpha)))
        return worst < tol, f"max |partial sum - closed form| = {worst:.3e} (tol {tol:g})"
    return _timed(1, "sum rule, shrinking well", run)


def normalization_expanding(k_max: int = 10_000, tol: float = 1e-6) -> CriterionResult:
    def run():
        worst = 0.0
        for n in (1, 2, 3):
            for alpha in (1.5, 2.0):
                s = total_probability_sum(n, WellGeometry(), WellGeometry(0.0, alpha), k_max)
                worst = max(worst, abs(s - 1.0))
        return worst < tol, f"max |sum - 1| = {worst:.3e} (tol {tol:g})"
    return _timed(2, "normalization, expanding well", run)


def degenerate_case(tol: float = 1e-10) -> CriterionResult:
    def run():
        w = np.array([shrinking_amplitude(2, k, 0.5) ** 2 for k in range(1, 65)])
        nonzero = np.flatnonzero(w > tol)
        ok = nonzero.tolist() == [0] and abs(w[0] - 0.5) < tol
        return ok, f"nonzero k = {(nonzero + 1).tolist()}, W_21 = {w[0]:.12f}"
    return _timed(3, "degenerate case n=2, alpha=0.5", run)


def simpson_overlaps(alpha: float, n_max: int = 20, panels: int = 100_000) -> np.ndarray:
    """<k_f|n_i> for the shrinking well on [0, alpha] by composite Simpson."""
    x = np.linspace(0.0, alpha, panels + 1)
    idx = np.arange(1, n_max + 1)[:, None]
    phi_i = math.sqrt(2.0) * np.sin(math.pi * idx * x)
    phi_f = math.sqrt(2.0 / alpha) * np.sin(math.pi * idx * x / alpha)
    return simpson(phi_f[:, None, :] * phi_i[None, :, :], x=x, axis=-1)


def closed_form_vs_quadrature(tol: float = 1e-8) -> CriterionResult:
    def run():
        worst = 0.0
        for alpha in (0.3, 0.5, 0.9):
            quad = simpson_overlaps(alpha)
            closed = np.array([[shrinking_amplitude(n, k, alpha) for n in range(1, 21)] for k in range(1, 21)])
            k, n = np.meshgrid(np.arange(1, 21), np.arange(1, 21), indexing="ij")
            signed = overlap_amplitude(n, k, WellGeometry(), WellGeometry(0.0, alpha))
            worst = max(worst, float(np.max(np.abs(np.abs(quad) - closed))),
                        float(np.max(np.abs(quad - signed))))
        return worst < tol, f"max amplitude difference = {worst:.3e} (tol {tol:g})"
    return _timed(4, "closed form vs Simpson quadrature", run)


def table_one(n_max: int = 1000) -> CriterionResult:
    def run():
        shown = []
        ok = True
        for n, (ref, digit) in REFERENCE_OFFSETS.items():
            v = bessel_j1_zero(n).u - 1.0
            ok &= abs(v - ref) <= digit
            shown.append(f"u{n}-1={v:.6f}")
        worst = max(bessel_j1_zero(n).u - 1.0 - 1.0 / (4 * n) for n in range(1, n_max + 1))
        ok &= worst < 0
        return ok, ", ".join(shown) + f"; max(u_n-1 - 1/(4n)) = {worst:.3e}"
    return _timed(5, "J1 zero offsets u_n - 1", run)


def tau_identity(samples: int = 1000, tol: float = 1e-10) -> CriterionResult:
    def run():
        worst = 0.0
        laws = [MotionLaw.linear(0.5, 1.0), MotionLaw.linear(2.0, 3.0),
                MotionLaw.table([(0.0, 1.0), (0.4, 0.7), (1.0, 1.3)])]
        for law in laws:
            ts = np.linspace(0.0, law.duration_T, samples)
            closed = tau_of_t(law, ts)
            numeric = np.array([tau_of_t_numeric(law, t) for t in ts])
            worst = max(worst, float(np.max(np.abs(closed - numeric))))
        return worst < tol, f"max |tau closed - tau numeric| = {worst:.3e} (tol {tol:g})"
    return _timed(6, "tau(t) identity", run)


def _norm_note(report, drifts):
    drifts.append(report.norm_drift)


def sudden_limit(drifts: list | None = None, tol: float = 1e-2) -> CriterionResult:
    drifts = [] if drifts is None else drifts

    def run():
        rep = evolve_mapped(1, MotionLaw.linear(0.5, 1e-3 * LEVEL_TIME))
        _norm_note(rep, drifts)
        ref = np.array([shrinking_amplitude(1, k, 0.5) ** 2 for k in range(1, 6)])
        rel = np.abs(rep.W_table[:5] - ref) / ref
        return float(rel.max()) < tol, f"max relative deviation k<=5 = {rel.max():.3e} (tol {tol:g})"
    return _timed(7, "sudden limit of the dynamics", run)


def adiabatic_limit(drifts: list | None = None) -> CriterionResult:
    drifts = [] if drifts is None else drifts

    def run():
        rep = evolve_mapped(1, MotionLaw.linear(0.5, 1e2 * LEVEL_TIME))
        _norm_note(rep, drifts)
        w = float(rep.W_table[0])
        return w > 0.99, f"W_11 = {w:.6f} (need > 0.99)"
    return _timed(8, "adiabatic limit", run)


def continuum_leakage(heights=(1e3, 1e4, 1e5, 1e6), tol: float = 1e-2) -> CriterionResult:
    def run():
        devs = []
        for V in heights:
            with warnings.catch_warnings():
                # the shallowest well of the sweep is below the comfortable 100 E_1 range
                warnings.simplefilter("ignore", RuntimeWarning)
                leak = 1.0 - bound_overlap_sum(1, RegularizedWell(V, 1.0), RegularizedWell(V, 0.5))
            devs.append(abs(leak - 0.5))
        decreasing = all(b < a for a, b in zip(devs, devs[1:]))
        shown = ", ".join(f"{d:.4f}" for d in devs)
        return devs[-1] < tol and decreasing, f"|leakage - 0.5| along V sweep = [{shown}]"
    return _timed(9, "continuum leakage", run)


def perturbation_errors(deltas=(1.0, 0.5, 0.25), alpha_final: float = 1.1, operator: str = "dilation",
                        drifts: list | None = None, units: Units = Units()):
    """Relative error of the first-order 1 -> 2 probability against the grid solver.

    delta is the expansion parameter at t = 0; T follows from alpha' = (alpha_final - 1)/T.
    """
    gap = mapped_eigen_energy(2, 1.0, units) - mapped_eigen_energy(1, 1.0, units)
    errors = []
    for delta in deltas:
        alpha_prime = gap / (units.hbar * delta)
        law = MotionLaw.linear(alpha_final, (alpha_final - 1.0) / alpha_prime)
        rep = evolve_mapped(1, law, units=units)
        if drifts is not None:
            drifts.append(rep.norm_drift)
        exact = float(rep.W_table[1])
        approx = abs(first_order_amplitude(1, 2, law, units, operator=operator)) ** 2
        errors.append(abs(approx - exact) / exact)
    return errors


def perturbation_trend(drifts: list | None = None) -> CriterionResult:
    def run():
        errs = perturbation_errors(drifts=drifts)
        ok = all(b < a for a, b in zip(errs, errs[1:]))
        shown = ", ".join(f"{e:.4f}" for e in errs)
        return ok, f"relative error at delta = 1, 0.5, 0.25: [{shown}] (must decrease)"
    return _timed(10, "first-order validity trend", run)


def unitarity(drifts: list | None = None, tol: float = 1e-6) -> CriterionResult:
    drifts = [] if drifts is None else list(drifts)

    def run():
        law = MotionLaw.linear(0.5, LEVEL_TIME)
        table = convergence_sweep(evolve_mapped, 257, 1.25e-4, levels=3, n=1, law=law)
        drifts.extend(table.norm_drifts)
        order = table.observed_orders[-1]
        worst = max(drifts)
        ok = worst < tol and abs(order - 2.0) <= 0.5
        return ok, f"max norm drift = {worst:.2e} over {len(drifts)} runs, observed order = {order:.3f}"
    return _timed(11, "unitarity and convergence order", run)


def run_all(echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
    """Evaluate every criterion in order; ``echo`` receives each result line as it finishes."""
    drifts: list[float] = []
    checks = [
        sum_rule_shrinking, normalization_expanding, degenerate_case, closed_form_vs_quadrature,
        table_one, tau_identity,
        lambda: sudden_limit(drifts), lambda: adiabatic_limit(drifts), continuum_leakage,
        lambda: perturbation_trend(drifts), lambda: unitarity(drifts),
    ]
    results = []
    for check in checks:
        res = check()
        results.append(res)
        if echo is not None:
            echo(res.line())
    return results

import math

import numpy as np
import pytest

from movingwell import (ConfigurationError, MotionLaw, NumericError, WellGeometry, convergence_sweep,
                        evolve_lab, evolve_lab_sudden, evolve_mapped, shrinking_amplitude, transition_table)
from movingwell.tdse import default_box

TAU1 = 1 / (math.pi**2 / 2)


@pytest.fixture(scope="module")
def moderate():
    return evolve_mapped(1, MotionLaw.linear(0.5, TAU1))


def test_static_law_keeps_state():
    for law in (MotionLaw.linear(1.0, 3.0), MotionLaw.table([(0, 1), (0.5, 1), (1, 1)])):
        rep = evolve_mapped(2, law, grid_N=512)
        assert rep.W_table[1] == pytest.approx(1.0, abs=1e-8)
        assert rep.step_count > 0


def test_sudden_limit_matches_closed_form():
    rep = evolve_mapped(1, MotionLaw.linear(0.5, 1e-3 * TAU1))
    ref = np.array([shrinking_amplitude(1, k, 0.5) ** 2 for k in range(1, 6)])
    assert np.allclose(rep.W_table[:5], ref, rtol=1e-2)


def test_matches_exact_oracle(moderate, exact):
    ref = exact(1, 0.5, TAU1, k_max=8)
    assert np.allclose(moderate.W_table, ref, atol=2e-6)


def test_expanding_well_matches_oracle(exact):
    rep = evolve_mapped(1, MotionLaw.linear(2.0, 0.3 * TAU1))
    assert np.allclose(rep.W_table, exact(1, 2.0, 0.3 * TAU1, k_max=8), atol=1e-5)


def test_report_invariants(moderate):
    assert moderate.norm_drift < 1e-10
    assert moderate.W_table.sum() <= 1 + 1e-6
    assert moderate.residual >= -1e-6
    s = moderate.series
    assert s["t"][0] == 0 and s["t"][-1] == pytest.approx(TAU1)
    assert s["alpha"][-1] == pytest.approx(0.5)
    assert np.all(np.abs(s["norm"] - 1) < 1e-10)
    state = moderate.final_state
    assert state.samples[0] == 0 and state.samples[-1] == 0
    assert state.domain == (0.0, 0.5) and state.norm == pytest.approx(1.0, abs=1e-10)


def test_transition_table_on_final_state(moderate):
    tab = transition_table(moderate, WellGeometry(0, 0.5), 8)
    assert np.allclose(tab.probabilities, moderate.W_table, atol=1e-10)
    assert tab.residual >= -1e-6


def test_transition_table_stationary_column():
    rep = evolve_mapped(3, MotionLaw.linear(1.0, 1.0), grid_N=512)
    tab = transition_table(rep, WellGeometry(), 6)
    assert np.allclose(tab.probabilities, np.eye(6)[2], atol=1e-8)


def test_limit_bracketing():
    ws = [evolve_mapped(1, MotionLaw.linear(0.5, f * TAU1), grid_N=512).W_table[0]
          for f in (1e-3, 1e-2, 1e-1, 1.0, 10.0)]
    assert ws[0] == pytest.approx(shrinking_amplitude(1, 1, 0.5) ** 2, rel=1e-2)
    assert all(b >= a - 1e-2 for a, b in zip(ws, ws[1:]))
    assert ws[-1] > 0.99


def test_lab_static_well():
    rep = evolve_lab(1, MotionLaw.linear(1.0, TAU1), 1e5)
    assert rep.W_table[0] == pytest.approx(1.0, abs=1e-6)


def test_lab_agrees_with_mapped(moderate):
    rep = evolve_lab(1, MotionLaw.linear(0.5, TAU1), 1e5)
    # two percentage points of probability on every W_1k, k <= 5
    assert np.max(np.abs(rep.W_table[:5] - moderate.W_table[:5])) < 2e-2
    assert rep.W_table[0] == pytest.approx(moderate.W_table[0], rel=2e-2)
    assert rep.norm_drift < 1e-6


def test_lab_disagreement_shrinks_with_wall_height(moderate):
    # finite walls widen the well by about 2/kappa; the gap on W_12 tracks 1/sqrt(V)
    gaps = [abs(evolve_lab(1, MotionLaw.linear(0.5, TAU1), V, grid_N=8192).W_table[1] / moderate.W_table[1] - 1)
            for V in (1e5, 1e6)]
    assert gaps[1] < gaps[0]
    assert gaps[0] / gaps[1] == pytest.approx(math.sqrt(10), rel=0.15)


def test_lab_probability_accounting():
    rep = evolve_lab(1, MotionLaw.linear(0.5, 0.1 * TAU1), 1e5, grid_N=1024)
    psi = rep.final_state.samples
    h = rep.final_state.spacing
    assert rep.bound_total + rep.continuum == pytest.approx(1.0, abs=1e-12)
    assert np.sum(np.abs(psi) ** 2) * h == pytest.approx(1.0, abs=1e-4)
    # a gradual squeeze sheds almost nothing into the continuum
    assert -1e-10 < rep.continuum < 1e-4


def test_lab_sudden_swap_leaks_half():
    rep = evolve_lab_sudden(1, WellGeometry(), WellGeometry(0, 0.5), 1e5, grid_N=4096)
    assert rep.bound_total == pytest.approx(0.5, abs=2e-2)
    assert rep.continuum == pytest.approx(0.5, abs=2e-2)


def test_configuration_errors():
    law = MotionLaw.linear(0.5, TAU1)
    with pytest.raises(ConfigurationError):
        evolve_mapped(1, law, grid_N=100)
    with pytest.raises(ConfigurationError):
        evolve_mapped(1, law, d_tau=1e-2)
    with pytest.raises(ConfigurationError):
        evolve_lab(1, law, 100.0)
    with pytest.raises(ConfigurationError):
        evolve_lab(1, law, 1e5, box=(-0.01, 1.01))
    with pytest.raises(ConfigurationError):
        evolve_lab(1, MotionLaw.linear(2.0, TAU1), 1e5, box=default_box(law, 1e5))


def test_errors_are_value_and_arithmetic_errors():
    assert issubclass(ConfigurationError, ValueError)
    assert issubclass(NumericError, ArithmeticError)


def test_convergence_is_second_order():
    table = convergence_sweep(evolve_mapped, 257, 1.25e-4, levels=3, n=1, law=MotionLaw.linear(0.5, TAU1))
    assert table.grid_N == [257, 513, 1025]
    assert table.error_ratios[0] == pytest.approx(4.0, abs=1.0)
    assert table.observed_orders[0] == pytest.approx(2.0, abs=0.5)
    assert abs(table.extrapolated - table.values[-1]) < 1e-4
    assert max(table.norm_drifts) < 1e-10


def test_lab_convergence_sweep_runs():
    table = convergence_sweep(evolve_lab, 1024, 2e-4, levels=2, n=1, law=MotionLaw.linear(0.5, TAU1), V_num=1e5)
    assert len(table.values) == 2
    assert table.differences[0] < 5e-3

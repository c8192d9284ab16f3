import math

import numpy as np
import pytest
from scipy import integrate

from movingwell import DomainError, EigenState, MotionLaw, Units, WellGeometry, alpha_at, eigen_energy
from movingwell import eigenfunction_value


def test_ground_energy_natural_units():
    assert eigen_energy(1) == pytest.approx(math.pi**2 / 2, rel=1e-15)


def test_energy_scales_with_width_and_units():
    g = WellGeometry(0.3, 2.0)
    u = Units(hbar=2.0, mass=3.0)
    assert eigen_energy(3, g, u) == pytest.approx((math.pi * 2.0 * 3) ** 2 / (2 * 3.0 * 4.0))


@pytest.mark.parametrize("bad", [dict(width=0.0), dict(width=-1.0)])
def test_geometry_rejects_nonpositive_width(bad):
    with pytest.raises(DomainError):
        WellGeometry(**bad)


def test_quantum_number_must_be_positive():
    with pytest.raises(DomainError):
        eigen_energy(0)


def test_eigenfunctions_orthonormal():
    g = WellGeometry(-0.2, 1.7)
    for n in (1, 2, 5):
        for m in (1, 2, 5):
            val, _ = integrate.quad(lambda x: eigenfunction_value(n, x, g) * eigenfunction_value(m, x, g),
                                    g.a, g.right, limit=200)
            assert val == pytest.approx(float(n == m), abs=1e-12)


def test_eigenfunction_vanishes_outside_and_on_edges():
    g = WellGeometry(1.0, 2.0)
    x = np.array([0.0, 1.0, 3.0, 4.0])
    assert np.all(eigenfunction_value(2, x, g) == 0.0)


def test_eigenstate_wraps_module_functions():
    s = EigenState(2, WellGeometry(0, 2))
    assert s.energy == eigen_energy(2, WellGeometry(0, 2))
    assert s(0.5) == eigenfunction_value(2, 0.5, WellGeometry(0, 2))


def test_scaled_geometry():
    g = WellGeometry.scaled(0.5, a=0.1, base_width=2.0)
    assert (g.a, g.width, g.right) == (0.1, 1.0, 1.1)


def test_linear_law():
    law = MotionLaw.linear(0.5, 2.0)
    assert alpha_at(law, 0.0) == 1.0
    assert alpha_at(law, 1.0) == pytest.approx(0.75)
    assert alpha_at(law, 2.0) == pytest.approx(0.5)
    assert law.velocity(1.3) == pytest.approx(-0.25)


def test_table_law_interpolates():
    law = MotionLaw.table([(0, 1), (1, 2), (2, 1.5)])
    assert alpha_at(law, np.array([0.5, 1.5])) == pytest.approx([1.5, 1.75])
    assert law.velocity(0.5) == 1.0 and law.velocity(1.5) == -0.5
    assert law.alpha_final == 1.5 and law.duration_T == 2


@pytest.mark.parametrize("samples", [
    [(0, 1)],
    [(0.1, 1), (1, 2)],
    [(0, 1.2), (1, 2)],
    [(0, 1), (1, 2), (1, 3)],
    [(0, 1), (1, -0.5)],
])
def test_table_law_validation(samples):
    with pytest.raises(DomainError):
        MotionLaw.table(samples)


def test_law_rejects_bad_inputs():
    with pytest.raises(DomainError):
        MotionLaw.linear(0.5, 0.0)
    with pytest.raises(DomainError):
        MotionLaw.linear(0.0, 1.0)
    with pytest.raises(DomainError):
        alpha_at(MotionLaw.linear(0.5, 1.0), 1.5)

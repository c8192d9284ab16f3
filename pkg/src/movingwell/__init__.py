"""Quantum particle in an infinite square well whose width changes in time.

Sudden-change transition probabilities, the rescaled-frame Bessel basis and
first-order theory, finite-wall regularization, and Crank-Nicolson evolution
in the rescaled and laboratory frames.
"""

__version__ = "0.1.0"

from .errors import ConfigurationError, DomainError, MovingWellError, NumericError
from .well import EigenState, MotionLaw, Units, WellGeometry, alpha_at, eigen_energy, eigenfunction_value
from .sudden import (OverlapMatrix, TransitionSummary, overlap_amplitude, overlap_matrix, probability_deficit,
                     shrinking_amplitude, summarize, total_probability_closed_form, total_probability_sum,
                     transition_probability)
from .bessel import (BesselZero, MappedEigenState, bessel_j, bessel_j1_zero, mapped_eigen_energy,
                     mapped_eigenfunction)
from .mapped import (MappedTime, bessel_integrals, dilation_rate, expansion_parameter, first_order_amplitude,
                     perturbation_matrix_element, perturbation_terms, tau_of_t, tau_of_t_numeric)
from .regularized import (BoundLevel, RegularizedWell, bound_levels, bound_overlap_sum, bound_overlaps,
                          count_bound_states)
from .tdse import (EvolutionReport, GridState, convergence_sweep, evolve_lab, evolve_lab_sudden,
                   evolve_mapped, transition_table)

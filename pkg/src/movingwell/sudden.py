"""Sudden-jump transition amplitudes between two infinite wells.

Amplitudes are the overlap integrals of the two sine eigenbases over the
intersection of the supports, evaluated with the exact antiderivative of a
product of sines.  Probabilities, their row sums and the projector value of the
total probability follow from these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .well import WellGeometry

DEFAULT_K_MAX = 1024
DEGENERATE_TOL = 1e-9


def _sinc(u):
    # sin(u)/u with the removable singularity filled in
    return np.sinc(np.asarray(u) / np.pi)


def overlap_amplitude(n, k, geometry_i: WellGeometry, geometry_f: WellGeometry):
    """Signed overlap <n_i | k_f> of two sine eigenstates.

    ``n`` and ``k`` may be integer arrays (broadcast against each other).
    """
    n = np.asarray(n)
    k = np.asarray(k)
    if np.any(n < 1) or np.any(k < 1):
        raise DomainError("quantum numbers must be >= 1")
    a1, w1 = geometry_i.a, geometry_i.width
    a2, w2 = geometry_f.a, geometry_f.width
    lo = max(a1, a2)
    hi = min(a1 + w1, a2 + w2)
    if hi <= lo:
        out = np.zeros(np.broadcast(n, k).shape)
        return out if out.ndim else 0.0
    p = math.pi * n / w1
    q = math.pi * k / w2
    length = hi - lo
    mid = 0.5 * (hi + lo)
    d = p - q
    s = p + q
    # sin(p(x-a1)) sin(q(x-a2)) = [cos(d x + phi) - cos(s x + psi)] / 2
    phi = -p * a1 + q * a2
    psi = -p * a1 - q * a2
    val = (length / math.sqrt(w1 * w2)) * (
        np.cos(d * mid + phi) * _sinc(0.5 * d * length)
        - np.cos(s * mid + psi) * _sinc(0.5 * s * length)
    )
    return val if np.ndim(val) else float(val)


def transition_probability(n, k, geometry_i: WellGeometry, geometry_f: WellGeometry):
    """W_nk = |<n_i | k_f>|^2."""
    return np.square(overlap_amplitude(n, k, geometry_i, geometry_f))


def shrinking_amplitude(n: int, k: int, alpha: float) -> float:
    """|M_nk| for the well [0, 1] shrinking to [0, alpha] in closed form.

    When ``k`` equals ``n*alpha`` the ratio is 0/0 and the limit sqrt(alpha)
    is returned instead.
    """
    if n < 1 or k < 1:
        raise DomainError("quantum numbers must be >= 1")
    if not 0 < alpha <= 1:
        raise DomainError(f"closed form needs 0 < alpha <= 1, got {alpha}")
    na = n * alpha
    if abs(k - na) < DEGENERATE_TOL:
        return math.sqrt(alpha)
    return 2.0 * k * math.sqrt(alpha) / math.pi * abs(math.sin(math.pi * na) / (k * k - na * na))


def total_probability_closed_form(n: int, alpha: float) -> float:
    """Total probability alpha (1 - sin(2 pi n alpha) / (2 pi n alpha)) for [0,1] -> [0,alpha].

    For ``alpha >= 1`` the final well covers the initial one and the result is 1.
    """
    if n < 1:
        raise DomainError(f"quantum number must be >= 1, got {n}")
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if alpha >= 1:
        return 1.0
    x = 2.0 * math.pi * n * alpha
    return alpha * (1.0 - math.sin(x) / x)


def total_probability_sum(n: int, geometry_i: WellGeometry, geometry_f: WellGeometry,
                          k_max: int = DEFAULT_K_MAX) -> float:
    """Partial sum of W_nk over k = 1..k_max."""
    if k_max < 1:
        raise DomainError(f"k_max must be >= 1, got {k_max}")
    k = np.arange(1, k_max + 1)
    return float(np.sum(transition_probability(n, k, geometry_i, geometry_f)))


def covered_probability(n: int, geometry_i: WellGeometry, geometry_f: WellGeometry) -> float:
    """Weight of |psi_n,i|^2 inside the final support (the projector value)."""
    if n < 1:
        raise DomainError(f"quantum number must be >= 1, got {n}")
    a1, w1 = geometry_i.a, geometry_i.width
    lo = max(a1, geometry_f.a)
    hi = min(a1 + w1, geometry_f.right)
    if lo <= a1 and hi >= a1 + w1:
        return 1.0
    if hi <= lo:
        return 0.0
    p2 = 2.0 * math.pi * n / w1
    inner = (hi - lo) - (math.sin(p2 * (hi - a1)) - math.sin(p2 * (lo - a1))) / p2
    return min(max(inner / w1, 0.0), 1.0)


def probability_deficit(n: int, geometry_i: WellGeometry, geometry_f: WellGeometry) -> float:
    """1 - W(n; i|f): the probability not accounted for by any final bound state."""
    return 1.0 - covered_probability(n, geometry_i, geometry_f)


@dataclass(frozen=True)
class TransitionSummary:
    n: int
    total_probability: float
    partial_sum: float
    k_max: int

    @property
    def deficit(self) -> float:
        return 1.0 - self.total_probability


def summarize(n: int, geometry_i: WellGeometry, geometry_f: WellGeometry,
              k_max: int = DEFAULT_K_MAX) -> TransitionSummary:
    return TransitionSummary(
        n=n,
        total_probability=covered_probability(n, geometry_i, geometry_f),
        partial_sum=total_probability_sum(n, geometry_i, geometry_f, k_max),
        k_max=k_max,
    )


@dataclass(frozen=True)
class OverlapMatrix:
    """Dense table M[n-1, k-1] = <n_i | k_f>."""

    amplitudes: np.ndarray
    geometry_i: WellGeometry
    geometry_f: WellGeometry

    @property
    def n_max(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def k_max(self) -> int:
        return self.amplitudes.shape[1]

    @property
    def probabilities(self) -> np.ndarray:
        return self.amplitudes**2

    @property
    def row_sums(self) -> np.ndarray:
        return self.probabilities.sum(axis=1)


def overlap_matrix(n_max: int, k_max: int, geometry_i: WellGeometry,
                   geometry_f: WellGeometry) -> OverlapMatrix:
    if n_max < 1 or k_max < 1:
        raise DomainError("n_max and k_max must be >= 1")
    n = np.arange(1, n_max + 1)[:, None]
    k = np.arange(1, k_max + 1)[None, :]
    return OverlapMatrix(np.asarray(overlap_amplitude(n, k, geometry_i, geometry_f)),
                         geometry_i, geometry_f)

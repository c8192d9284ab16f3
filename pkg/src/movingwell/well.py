"""Infinite square well: units, geometry, wall motion laws and the sine eigenbasis."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Units:
    """Reduced Planck constant and particle mass (natural units by default)."""

    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and self.mass > 0):
            raise DomainError(f"hbar and mass must be positive, got {self.hbar}, {self.mass}")


@dataclass(frozen=True)
class WellGeometry:
    """Support ``[a, a + width]`` of an infinite well."""

    a: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if not self.width > 0:
            raise DomainError(f"well width must be positive, got {self.width}")

    @property
    def right(self) -> float:
        return self.a + self.width

    @classmethod
    def scaled(cls, alpha: float, a: float = 0.0, base_width: float = 1.0) -> "WellGeometry":
        """Final well ``[a, a + base_width*alpha]``."""
        return cls(a=a, width=base_width * alpha)


@dataclass(frozen=True)
class MotionLaw:
    """Width scale factor alpha(t) on ``[0, T]`` with alpha(0) = 1.

    ``kind="linear"`` is ``alpha(t) = 1 + alpha' t``; ``kind="table"`` interpolates
    ``samples`` (pairs ``(t, alpha)``) piecewise linearly.
    """

    kind: Literal["linear", "table"]
    alpha_final: float
    duration_T: float
    samples: tuple[tuple[float, float], ...] = field(default=())

    def __post_init__(self):
        if self.kind not in ("linear", "table"):
            raise DomainError(f"unknown motion law kind {self.kind!r}")
        if not self.duration_T > 0:
            raise DomainError(f"duration must be positive, got {self.duration_T}")
        if not self.alpha_final > 0:
            raise DomainError(f"alpha_final must be positive, got {self.alpha_final}")
        if self.kind == "table":
            ts = [s[0] for s in self.samples]
            al = [s[1] for s in self.samples]
            if len(ts) < 2:
                raise DomainError("a table law needs at least two samples")
            if ts[0] != 0.0 or al[0] != 1.0:
                raise DomainError("a table law must start at (t=0, alpha=1)")
            if any(t1 <= t0 for t0, t1 in zip(ts, ts[1:])):
                raise DomainError("table sample times must be strictly increasing")
            if any(a <= 0 for a in al):
                raise DomainError("alpha must stay positive")
            if not math.isclose(ts[-1], self.duration_T) or not math.isclose(al[-1], self.alpha_final):
                raise DomainError("last table sample must be (T, alpha_final)")

    @classmethod
    def linear(cls, alpha_final: float, T: float) -> "MotionLaw":
        return cls("linear", float(alpha_final), float(T))

    @classmethod
    def table(cls, samples: Sequence[tuple[float, float]]) -> "MotionLaw":
        samples = tuple((float(t), float(a)) for t, a in samples)
        return cls("table", samples[-1][1], samples[-1][0], samples)

    @property
    def alpha_prime(self) -> float:
        """Constant wall-scale velocity of the linear law (mean velocity for tables)."""
        return (self.alpha_final - 1.0) / self.duration_T

    @property
    def knots(self) -> tuple[np.ndarray, np.ndarray]:
        """Breakpoints ``(t, alpha)`` of the piecewise-linear law."""
        if self.kind == "linear":
            return np.array([0.0, self.duration_T]), np.array([1.0, self.alpha_final])
        arr = np.asarray(self.samples, dtype=float)
        return arr[:, 0], arr[:, 1]

    def _check_t(self, t):
        t = np.asarray(t, dtype=float)
        eps = 1e-12 * self.duration_T
        if np.any(t < -eps) or np.any(t > self.duration_T + eps):
            raise DomainError(f"t must lie in [0, {self.duration_T}]")
        return np.clip(t, 0.0, self.duration_T)

    def velocity(self, t):
        """d alpha / dt (right-continuous at table knots)."""
        t = self._check_t(t)
        if self.kind == "linear":
            return np.full_like(t, self.alpha_prime) if t.ndim else float(self.alpha_prime)
        ts, al = self.knots
        slopes = np.diff(al) / np.diff(ts)
        idx = np.clip(np.searchsorted(ts, t, side="right") - 1, 0, len(slopes) - 1)
        out = slopes[idx]
        return out if np.ndim(out) else float(out)


def alpha_at(law: MotionLaw, t):
    """Width scale factor alpha(t); raises :class:`DomainError` outside ``[0, T]``."""
    t = law._check_t(t)
    if law.kind == "linear":
        out = 1.0 + law.alpha_prime * t
    else:
        ts, al = law.knots
        out = np.interp(t, ts, al)
    return out if np.ndim(out) else float(out)


def eigen_energy(n: int, geometry: WellGeometry = WellGeometry(), units: Units = Units()) -> float:
    """Energy (pi hbar n)^2 / (2 m width^2) of level ``n``."""
    if n < 1:
        raise DomainError(f"quantum number must be >= 1, got {n}")
    return (math.pi * units.hbar * n) ** 2 / (2.0 * units.mass * geometry.width**2)


def eigenfunction_value(n: int, x, geometry: WellGeometry = WellGeometry()):
    """sqrt(2/w) sin(pi n (x-a)/w) inside the well, exactly zero elsewhere."""
    if n < 1:
        raise DomainError(f"quantum number must be >= 1, got {n}")
    x = np.asarray(x, dtype=float)
    w = geometry.width
    s = (x - geometry.a) / w
    inside = (s > 0.0) & (s < 1.0)
    out = np.where(inside, math.sqrt(2.0 / w) * np.sin(math.pi * n * np.where(inside, s, 0.0)), 0.0)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class EigenState:
    n: int
    geometry: WellGeometry = WellGeometry()
    units: Units = Units()

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"quantum number must be >= 1, got {self.n}")

    @property
    def energy(self) -> float:
        return eigen_energy(self.n, self.geometry, self.units)

    def __call__(self, x):
        return eigenfunction_value(self.n, x, self.geometry)

"""Convex-sum machinery for Takagi-Sugeno blending.

Weighting functions here always come in complementary pairs ``(w1, w2)``
with ``w1 + w2 == 1``.  Products of such pairs across premise variables give
rule memberships that are again convex, which is what lets a blend of
vertex matrices reproduce a nonlinear gain exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

CONVEX_TOL = 1e-12


class OutOfSectorError(ValueError):
    """A value fell outside the sector it is supposed to be bounded by."""


@dataclass(frozen=True)
class RampPair:
    """Complementary ramps rising from ``lo`` to ``hi``.

    ``shape`` is ``"linear"`` (saturating ramp) or ``"smoothstep"``
    (cubic Hermite, C1 at both ends).
    """

    lo: float
    hi: float
    shape: str = "linear"

    SHAPES = ("linear", "smoothstep")

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"ramp requires lo < hi, got lo={self.lo}, hi={self.hi}")
        if self.shape not in self.SHAPES:
            raise ValueError(f"unknown ramp shape {self.shape!r}")

    @classmethod
    def from_overlap(cls, center: float, overlap: float, shape: str = "linear") -> "RampPair":
        """Ramp that completes at ``center`` and starts at ``(1 - overlap) * center``."""
        if not 0.0 < overlap <= 0.5:
            raise ValueError(f"overlap factor must lie in (0, 0.5], got {overlap}")
        return cls((1.0 - overlap) * center, center, shape)


@dataclass(frozen=True)
class SectorBounds:
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(
                f"sector requires lower < upper, got {self.lower}, {self.upper}")


def _clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)


def ramp_weights(x: float, ramp: RampPair) -> tuple[float, float]:
    """Return ``(w1, w2)`` where ``w2`` rises from 0 at ``ramp.lo`` to 1 at ``ramp.hi``."""
    s = _clamp01((x - ramp.lo) / (ramp.hi - ramp.lo))
    if ramp.shape == "smoothstep":
        s = s * s * (3.0 - 2.0 * s)
    return 1.0 - s, s


def exact_sector_weights(f_value: float, bounds: SectorBounds) -> tuple[float, float]:
    """Sector-nonlinearity weights reproducing ``f_value`` from its bounds.

    ``w1 * bounds.lower + w2 * bounds.upper == f_value``.
    """
    # a few ulps of slack so values computed right at a bound are accepted
    slack = 4 * np.finfo(float).eps * max(abs(bounds.lower), abs(bounds.upper), 1.0)
    if not bounds.lower - slack <= f_value <= bounds.upper + slack:
        raise OutOfSectorError(
            f"value {f_value!r} outside sector [{bounds.lower}, {bounds.upper}]")
    w1 = _clamp01((bounds.upper - f_value) / (bounds.upper - bounds.lower))
    return w1, 1.0 - w1


def validate_memberships(h: Sequence[float], tol: float = CONVEX_TOL) -> np.ndarray:
    """Check that ``h`` is nonnegative and sums to one; return it as an array."""
    h = np.asarray(h, dtype=float)
    if h.ndim != 1 or h.size == 0:
        raise ValueError("membership vector must be a non-empty 1-D sequence")
    if np.any(h < 0.0):
        raise ValueError(f"negative membership in {h}")
    if abs(h.sum() - 1.0) > tol:
        raise ValueError(f"memberships sum to {h.sum()!r}, not 1")
    return h


def convex_combine(h: Sequence[float], vertices: Sequence) -> np.ndarray:
    """Elementwise ``sum_i h[i] * vertices[i]``."""
    if len(h) != len(vertices):
        raise ValueError(
            f"dimension mismatch: {len(h)} memberships for {len(vertices)} vertices")
    stacked = np.asarray(vertices, dtype=float)
    return np.tensordot(np.asarray(h, dtype=float), stacked, axes=1)


def product_memberships(*pairs: Sequence[float]) -> np.ndarray:
    """Outer product of per-variable weight vectors, flattened row-major.

    The first argument varies slowest, so for two pairs ``(a1, a2)`` and
    ``(b1, b2)`` the result is ``(a1*b1, a1*b2, a2*b1, a2*b2)``.
    """
    out = [1.0]
    for pair in pairs:
        out = [p * w for p in out for w in pair]
    return np.array(out)


def corner_index(n_vars: int) -> list[tuple[int, ...]]:
    """Corner labels in the same order as :func:`product_memberships`."""
    return list(itertools.product((0, 1), repeat=n_vars))

"""Empirical CDFs, one-sided Kolmogorov-Smirnov statistics and DKW radii."""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidParameterError


class Ecdf:
    """Right-continuous empirical CDF, ``F(t) = #{x_i <= t} / n``."""

    def __init__(self, samples):
        x = np.sort(np.asarray(samples, dtype=float).ravel())
        if x.size == 0:
            raise InvalidParameterError("ECDF needs at least one sample")
        self.sorted = x

    @property
    def n(self) -> int:
        return self.sorted.size

    def __call__(self, t):
        return np.searchsorted(self.sorted, t, side="right") / self.n

    def left_limit(self, t):
        """``F(t-) = #{x_i < t} / n``."""
        return np.searchsorted(self.sorted, t, side="left") / self.n


def ecdf(samples) -> Ecdf:
    return Ecdf(samples)


def one_sided_ks(x: Ecdf, y: Ecdf) -> float:
    """``sup_t F_x(t) - F_y(t)``, evaluated exactly at the pooled jump points.

    Both ECDFs are right-continuous and piecewise constant, so the supremum
    is attained at a jump (or just before one).
    """
    pts = np.union1d(x.sorted, y.sorted)
    at = x(pts) - y(pts)
    before = x.left_limit(pts) - y.left_limit(pts)
    return float(max(0.0, at.max(), before.max()))


def two_sided_ks(x: Ecdf, y: Ecdf) -> float:
    return max(one_sided_ks(x, y), one_sided_ks(y, x))


def dkw_radius(n: int, delta: float = 0.05) -> float:
    """Two-sided DKW radius ``sqrt(ln(2 / delta) / (2 n))``."""
    if n < 1:
        raise InvalidParameterError(f"n must be positive, got {n}")
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError(f"delta must lie in (0, 1), got {delta}")
    return math.sqrt(math.log(2.0 / delta) / (2.0 * n))

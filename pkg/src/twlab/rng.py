"""Reproducible random streams and the primitive samplers built on them.

Streams are Philox counter-based generators keyed by ``(seed, stream_id)``,
so parallel workers obtain independent, reproducible streams without any
coordination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .errors import InvalidParameterError

_MASK64 = (1 << 64) - 1


class RandomStream:
    """A single-owner random stream identified by ``(seed, stream_id)``."""

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        self._bitgen = np.random.Philox(key=[self.seed, self.stream_id])
        self.generator = np.random.Generator(self._bitgen)

    @property
    def position(self) -> int:
        """Philox block counter; advances monotonically as draws are made."""
        counter = self._bitgen.state["state"]["counter"]
        return int(counter[0]) | (int(counter[1]) << 64)

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, stream_id={self.stream_id}, position={self.position})"


def make_stream(seed: int, stream_id: int = 0) -> RandomStream:
    return RandomStream(seed, stream_id)


@dataclass(frozen=True)
class NoisePath:
    """Brownian increments on a uniform grid.

    ``increments[i]`` is ``b((i + 1) h) - b(i h)``; the path starts at 0.
    """

    h: float
    increments: np.ndarray

    def __post_init__(self):
        if not self.h > 0:
            raise InvalidParameterError(f"grid step must be positive, got {self.h}")
        if len(self.increments) < 1:
            raise InvalidParameterError("noise path needs at least one increment")

    def __len__(self) -> int:
        return len(self.increments)

    @property
    def extent(self) -> float:
        return self.h * len(self.increments)

    def path(self) -> np.ndarray:
        """Brownian values at ``0, h, 2h, ...`` (length ``len(self) + 1``)."""
        return np.concatenate(([0.0], np.cumsum(self.increments)))

    def coarsen(self, factor: int) -> "NoisePath":
        """Same Brownian path observed on a grid ``factor`` times coarser."""
        m = len(self.increments) // factor
        inc = self.increments[: m * factor].reshape(m, factor).sum(axis=1)
        return NoisePath(self.h * factor, inc)

    @classmethod
    def zeros(cls, h: float, m: int) -> "NoisePath":
        return cls(h, np.zeros(m))


def sample_gaussian(stream: RandomStream, mu: float = 0.0, sigma: float = 1.0, size=None):
    if sigma < 0:
        raise InvalidParameterError(f"sigma must be nonnegative, got {sigma}")
    if sigma == 0:
        return mu if size is None else np.full(size, float(mu))
    return stream.generator.normal(mu, sigma, size=size)


def gaussian_inverse_cdf(u):
    """Standard normal quantile; ``gaussian_inverse_cdf(1 - u) == -gaussian_inverse_cdf(u)``."""
    return special.ndtri(u)


def sample_chi(stream: RandomStream, dof, size=None):
    """Chi variates with real degrees of freedom, via ``sqrt(2 * Gamma(dof / 2))``."""
    dof_arr = np.asarray(dof, dtype=float)
    if np.any(dof_arr <= 0):
        raise InvalidParameterError(f"chi degrees of freedom must be positive, got {dof}")
    return np.sqrt(2.0 * stream.generator.standard_gamma(dof_arr / 2.0, size=size))


def chi_cdf(x: float, dof: float) -> float:
    if x <= 0:
        return 0.0
    return special.gammainc(dof / 2.0, x * x / 2.0)


def chi_inverse_cdf(u: float, dof: float, tol: float = 1e-10) -> float:
    """Quantile of the chi distribution by bracketed root finding.

    The returned ``x`` satisfies ``|chi_cdf(x, dof) - u| <= tol``.
    """
    if not 0.0 < u < 1.0:
        raise InvalidParameterError(f"u must lie in (0, 1), got {u}")
    if dof <= 0:
        raise InvalidParameterError(f"chi degrees of freedom must be positive, got {dof}")
    a = dof / 2.0
    # gammaincinv gives a starting guess; the bracket is then widened until it holds.
    guess = np.sqrt(2.0 * special.gammaincinv(a, u))
    if not np.isfinite(guess) or guess <= 0:
        guess = np.sqrt(dof)
    lo, hi = guess * 0.5, guess * 2.0 + 1e-300

    def resid(x):
        return special.gammainc(a, x * x / 2.0) - u

    while resid(lo) > 0:
        lo *= 0.5
        if lo < 1e-300:
            return 0.0
    while resid(hi) < 0:
        hi *= 2.0
    x = optimize.brentq(resid, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    if abs(resid(x)) > tol:
        x = optimize.bisect(resid, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=2000)
    return float(x)


def sample_brownian(stream: RandomStream, h: float, m: int) -> NoisePath:
    if not h > 0:
        raise InvalidParameterError(f"grid step must be positive, got {h}")
    if m < 1:
        raise InvalidParameterError(f"need at least one increment, got m={m}")
    return NoisePath(float(h), stream.generator.normal(0.0, np.sqrt(h), size=int(m)))

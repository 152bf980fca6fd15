"""Finite-difference Stochastic Airy Operators and their quadratic forms.

The operator ``-s d^2/dy^2 + y / s^2 + (2 / sqrt(s beta)) b'`` is discretized
on ``y_i = i h`` (``i = 1..m``) with Dirichlet conditions at ``0`` and ``L``.
White noise enters the diagonal as ``(b(y_i) - b(y_{i-1})) / h``.
``beta = math.inf`` gives the deterministic Airy operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .rng import NoisePath, RandomStream, sample_brownian
from .tridiag import TridiagMatrix, smallest_eigenvalues

INF = math.inf


@dataclass(frozen=True)
class SaoGrid:
    L: float = 10.0
    h: float = 0.01

    def __post_init__(self):
        if not (self.L > 0 and self.h > 0):
            raise InvalidParameterError(f"grid needs L > 0 and h > 0, got L={self.L}, h={self.h}")
        if self.m < 2:
            raise InvalidParameterError(f"grid has m={self.m} interior points, need at least 2")

    @property
    def m(self) -> int:
        return int(round(self.L / self.h)) - 1

    @property
    def points(self) -> np.ndarray:
        return self.h * np.arange(1, self.m + 1)

    def noise_length(self) -> int:
        """Increments needed to cover ``[0, L + 1]``, one unit past the domain."""
        return int(round((self.L + 1.0) / self.h))


@dataclass(frozen=True)
class SaoOperator:
    beta: float
    s: float
    grid: SaoGrid
    matrix: TridiagMatrix
    noise: NoisePath | None
    noise_term: np.ndarray


def noise_coefficient(beta: float, s: float = 1.0) -> float:
    if beta == INF:
        return 0.0
    return 2.0 / math.sqrt(s * beta)


def _check_noise(grid: SaoGrid, noise: NoisePath):
    if not math.isclose(noise.h, grid.h, rel_tol=1e-12):
        raise InvalidParameterError(f"noise step {noise.h} does not match grid step {grid.h}")
    if len(noise) < grid.m:
        raise InvalidParameterError(f"noise has {len(noise)} increments, grid needs {grid.m}")


def discretize_sao(beta: float, s: float, grid: SaoGrid, noise: NoisePath | None) -> SaoOperator:
    """Tridiagonal matrix of ``H_beta^s`` driven by the Brownian path ``noise``."""
    if not (beta > 0 and s > 0):
        raise InvalidParameterError(f"need beta > 0 and s > 0, got beta={beta}, s={s}")
    h, y = grid.h, grid.points
    coef = noise_coefficient(beta, s)
    if noise is None or coef == 0.0:
        if noise is not None:
            _check_noise(grid, noise)
        noise_term = np.zeros(grid.m)
    else:
        _check_noise(grid, noise)
        noise_term = coef * (noise.increments[: grid.m] / h)
    diag = 2.0 * s / h**2 + y / s**2 + noise_term
    off = np.full(grid.m - 1, -s / h**2)
    return SaoOperator(beta, s, grid, TridiagMatrix(diag, off), noise, noise_term)


def airy_operator(a: float, b: float, grid: SaoGrid) -> SaoOperator:
    """Deterministic ``-a d^2/dy^2 + b y`` on the grid."""
    h = grid.h
    diag = 2.0 * a / h**2 + b * grid.points
    off = np.full(grid.m - 1, -a / h**2)
    return SaoOperator(INF, 1.0, grid, TridiagMatrix(diag, off), None, np.zeros(grid.m))


def sample_noise(stream: RandomStream, grid: SaoGrid) -> NoisePath:
    return sample_brownian(stream, grid.h, grid.noise_length())


def sao_eigenvalues(op: SaoOperator, k: int, tol: float = 1e-10):
    return smallest_eigenvalues(op.matrix, k, tol)


def sample_tw(stream: RandomStream, beta: float, grid: SaoGrid | None = None, k: int = 1) -> np.ndarray:
    """Draw ``(-Lambda_0, ..., -Lambda_{k-1})`` of a fresh discretized ``H_beta``."""
    if k < 1:
        raise InvalidParameterError(f"k must be positive, got {k}")
    grid = grid or SaoGrid()
    noise = None if beta == INF else sample_noise(stream, grid)
    op = discretize_sao(beta, 1.0, grid, noise)
    return -sao_eigenvalues(op, k).eigenvalues


@dataclass(frozen=True)
class TestFunction:
    """Piecewise-linear function sampled at ``x_i = i h``, ``i = 0..len(values)-1``."""

    __test__ = False  # not a pytest class

    h: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 3:
            raise InvalidParameterError("test function needs at least 3 grid values")
        if values[0] != 0.0:
            raise InvalidParameterError("test function must vanish at 0")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, fn, h: float, support_end: float) -> "TestFunction":
        x = h * np.arange(int(round(support_end / h)) + 1)
        vals = np.asarray(fn(x), dtype=float)
        vals[0] = 0.0
        vals[-1] = 0.0
        return cls(h, vals)

    @property
    def x(self) -> np.ndarray:
        return self.h * np.arange(self.values.size)

    @property
    def support_end(self) -> float:
        nz = np.nonzero(self.values)[0]
        return 0.0 if nz.size == 0 else self.h * min(nz[-1] + 1, self.values.size - 1)

    def norm2(self) -> float:
        return float(np.trapezoid(self.values**2, dx=self.h))

    def energy(self) -> float:
        """``int f'^2 + (1 + x) f^2``, the weighted norm of the domain space."""
        d = np.diff(self.values) / self.h
        return float(np.sum(d * d) * self.h + np.trapezoid((1 + self.x) * self.values**2, dx=self.h))


def _deterministic_part(f: TestFunction) -> tuple[float, np.ndarray]:
    d = np.diff(f.values) / f.h
    return float(np.sum(d * d) * f.h + np.trapezoid(f.x * f.values**2, dx=f.h)), d


def _check_form_noise(f: TestFunction, noise: NoisePath, needed: float):
    if not math.isclose(noise.h, f.h, rel_tol=1e-12):
        raise InvalidParameterError(f"noise step {noise.h} does not match function step {f.h}")
    if noise.extent < needed - 1e-12:
        raise InvalidParameterError(f"noise covers [0, {noise.extent}], need [0, {needed}]")


def _cell_integral_ffprime(f: TestFunction, d: np.ndarray, g: np.ndarray) -> float:
    """Trapezoid value of ``int f f' g`` with ``f'`` constant on each cell."""
    fg = f.values * g
    return float(np.sum(d * 0.5 * (fg[:-1] + fg[1:])) * f.h)


def quadratic_form_compact(f: TestFunction, beta: float, noise: NoisePath | None) -> float:
    """``int f'^2 + x f^2 - (4 / sqrt(beta)) int f f' b`` for compactly supported ``f``."""
    det, d = _deterministic_part(f)
    coef = noise_coefficient(beta)
    if noise is None or coef == 0.0:
        return det
    _check_form_noise(f, noise, f.support_end)
    n = f.values.size
    b = noise.path()
    if b.size < n:
        b = np.concatenate((b, np.full(n - b.size, b[-1])))
    return det - 2.0 * coef * _cell_integral_ffprime(f, d, b[:n])


def averaged_path(noise: NoisePath, n: int) -> np.ndarray:
    """``bbar(x_i) = int_{x_i}^{x_i + 1} b`` at the first ``n`` grid points."""
    b = noise.path()
    w = int(round(1.0 / noise.h))
    if n + w > b.size:
        raise InvalidParameterError("noise path too short for the unit averaging window")
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (b[:-1] + b[1:]) * noise.h)))
    return cum[w : w + n] - cum[:n]


def quadratic_form_averaged(f: TestFunction, beta: float, noise: NoisePath | None) -> float:
    """Quadratic form using the decomposition ``b = bbar + (b - bbar)``.

    ``int f'^2 + x f^2 + (2 / sqrt(beta)) (int f^2 bbar' + 2 int f f' (bbar - b))``
    with ``bbar'(x) = b(x + 1) - b(x)``. Valid beyond compact support; agrees
    with :func:`quadratic_form_compact` up to quadrature error otherwise.
    """
    det, d = _deterministic_part(f)
    coef = noise_coefficient(beta)
    if noise is None or coef == 0.0:
        return det
    n = f.values.size
    _check_form_noise(f, noise, f.h * (n - 1) + 1.0)
    b = noise.path()
    w = int(round(1.0 / noise.h))
    bbar = averaged_path(noise, n)
    bbar_prime = b[w : w + n] - b[:n]
    term1 = float(np.trapezoid(f.values**2 * bbar_prime, dx=f.h))
    term2 = _cell_integral_ffprime(f, d, bbar - b[:n])
    return det + coef * (term1 + 2.0 * term2)

"""Spectral kernel for real symmetric tridiagonal matrices.

Eigenvalues come from bisection on Sturm counts, which yields certified
brackets for just the few smallest eigenvalues of very large matrices.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from . import _kernels
from .errors import InvalidParameterError, NumericalFailureError

EPS = np.finfo(float).eps


class NearDegenerateWarning(UserWarning):
    """Inverse iteration was asked for a numerically multiple eigenvalue."""


@dataclass(frozen=True)
class TridiagMatrix:
    diag: np.ndarray
    off: np.ndarray

    def __post_init__(self):
        diag = np.ascontiguousarray(self.diag, dtype=float)
        off = np.ascontiguousarray(self.off, dtype=float)
        if diag.ndim != 1 or diag.size < 1:
            raise InvalidParameterError("diag must be a nonempty 1-d array")
        if off.shape != (diag.size - 1,):
            raise InvalidParameterError(f"off must have length {diag.size - 1}, got {off.shape}")
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(off))):
            raise InvalidParameterError("matrix entries must be finite")
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "off", off)

    @property
    def n(self) -> int:
        return self.diag.size

    def norm_inf(self) -> float:
        row = np.abs(self.diag).copy()
        row[:-1] += np.abs(self.off)
        row[1:] += np.abs(self.off)
        return float(row.max())

    def gershgorin(self) -> tuple[float, float]:
        radius = np.zeros(self.n)
        radius[:-1] += np.abs(self.off)
        radius[1:] += np.abs(self.off)
        return float(np.min(self.diag - radius)), float(np.max(self.diag + radius))

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.off * v[1:]
        out[1:] += self.off * v[:-1]
        return out

    def __neg__(self) -> "TridiagMatrix":
        return TridiagMatrix(-self.diag, -self.off)

    def __sub__(self, other: "TridiagMatrix") -> "TridiagMatrix":
        return TridiagMatrix(self.diag - other.diag, self.off - other.off)

    def scaled(self, c: float) -> "TridiagMatrix":
        return TridiagMatrix(c * self.diag, c * self.off)


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    tol: float
    lower: np.ndarray = field(repr=False)
    upper: np.ndarray = field(repr=False)
    residuals: np.ndarray | None = None


def sturm_count(T: TridiagMatrix, x: float) -> int:
    """Number of eigenvalues of ``T`` strictly below ``x``."""
    return int(_kernels.sturm_count(T.diag, T.off * T.off, float(x)))


def _backward_error(T: TridiagMatrix) -> float:
    return 4.0 * EPS * max(T.norm_inf(), 1.0)


def smallest_eigenvalues(T: TridiagMatrix, k: int, tol: float = 1e-10) -> SpectrumResult:
    """The ``k`` smallest eigenvalues of ``T`` in ascending order.

    Each bracket is bisected until its width is at most ``tol``; the
    reported ``tol`` adds the rounding error of the Sturm recurrence.
    """
    if not 1 <= k <= T.n:
        raise InvalidParameterError(f"need 1 <= k <= n={T.n}, got k={k}")
    if not tol > 0:
        raise InvalidParameterError(f"tol must be positive, got {tol}")
    lo, hi = T.gershgorin()
    pad = _backward_error(T) + tol
    lower, upper = _kernels.bisect_smallest(T.diag, T.off * T.off, int(k), lo - pad, hi + pad, float(tol))
    return SpectrumResult(
        eigenvalues=0.5 * (lower + upper),
        tol=float(np.max(upper - lower)) / 2 + _backward_error(T),
        lower=lower,
        upper=upper,
    )


def largest_eigenvalues(T: TridiagMatrix, k: int, tol: float = 1e-10) -> SpectrumResult:
    """The ``k`` largest eigenvalues of ``T`` in descending order."""
    res = smallest_eigenvalues(-T, k, tol)
    return SpectrumResult(-res.eigenvalues, res.tol, -res.upper, -res.lower)


def eigenvector(T: TridiagMatrix, lam: float, max_restarts: int = 5) -> np.ndarray:
    """Unit eigenvector for an eigenvalue approximation ``lam`` by inverse iteration.

    Emits :class:`NearDegenerateWarning` if another eigenvalue lies within
    ``1e-10 * ||T||`` of ``lam``; the vector then lies in the invariant subspace.
    """
    n = T.n
    scale = max(T.norm_inf(), 1.0)
    bound = 1e-8 * scale
    if n == 1:
        return np.ones(1)
    gap_tol = 1e-10 * scale
    if sturm_count(T, lam + gap_tol) - sturm_count(T, lam - gap_tol) > 1:
        warnings.warn(f"eigenvalue {lam} is numerically multiple", NearDegenerateWarning, stacklevel=2)

    rng = np.random.default_rng(n)
    ab = np.zeros((3, n))
    ab[0, 1:] = T.off
    ab[2, :-1] = T.off
    v = np.ones(n) / np.sqrt(n)
    for restart in range(max_restarts + 1):
        shift = lam + (10 * EPS * scale) * (1 + restart)
        ab[1] = T.diag - shift
        for _ in range(4):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", linalg.LinAlgWarning)
                try:
                    x = linalg.solve_banded((1, 1), ab, v, check_finite=False)
                except linalg.LinAlgError:
                    break
            nrm = np.linalg.norm(x)
            if not np.isfinite(nrm) or nrm == 0:
                break
            v = x / nrm
            if np.linalg.norm(T.matvec(v) - lam * v) <= bound:
                return v
        v = rng.standard_normal(n)
        v /= np.linalg.norm(v)
    raise NumericalFailureError(f"inverse iteration did not converge near lambda={lam}")


@dataclass(frozen=True)
class PsdCertificate:
    """Outcome of a semidefiniteness check with a bracket on the smallest eigenvalue."""

    psd: bool
    tol: float
    min_eig_lower: float
    min_eig_upper: float

    def __bool__(self) -> bool:
        return self.psd


def is_positive_semidefinite(T: TridiagMatrix, tol: float = 0.0) -> PsdCertificate:
    """True iff no eigenvalue of ``T`` lies strictly below ``-tol``."""
    if tol < 0:
        raise InvalidParameterError(f"tol must be nonnegative, got {tol}")
    res = smallest_eigenvalues(T, 1, tol=max(1e-12 * max(T.norm_inf(), 1.0), 1e-14))
    return PsdCertificate(
        psd=sturm_count(T, -tol) == 0,
        tol=tol,
        min_eig_lower=float(res.lower[0]),
        min_eig_upper=float(res.upper[0]),
    )

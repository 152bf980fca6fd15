"""Shared-noise coupling of Stochastic Airy Operators and the resulting ordering.

For ``beta' > beta`` and a scale ``s``, put ``gamma = sqrt(beta' / (s beta))``.
On a common Brownian path the noise terms of ``gamma H_{beta'}`` and
``H_beta^s`` coincide, so their difference is the deterministic operator
``-(gamma - s) d^2/dy^2 + (gamma - 1/s^2) y``. When both coefficients are
nonnegative the difference is positive semidefinite and every eigenvalue of
``gamma H_{beta'}`` dominates the matching one of ``H_beta^s``; with
``alpha = s gamma`` this yields ``TW_beta >= alpha TW_{beta'}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientDataError, InvalidParameterError
from .rng import RandomStream
from .sao import SaoGrid, SaoOperator, airy_operator, discretize_sao, sample_noise, sao_eigenvalues
from .stats import dkw_radius, ecdf, one_sided_ks
from .tridiag import PsdCertificate, TridiagMatrix, is_positive_semidefinite


def _check_betas(beta: float, beta_prime: float):
    if not beta > 0:
        raise InvalidParameterError(f"beta must be positive, got {beta}")
    if not beta_prime > beta:
        raise InvalidParameterError(f"need beta_prime > beta, got beta={beta}, beta_prime={beta_prime}")


def admissible_s_range(beta: float, beta_prime: float) -> tuple[float, float]:
    _check_betas(beta, beta_prime)
    return (beta / beta_prime) ** (1 / 3), (beta_prime / beta) ** (1 / 3)


def admissible_alpha_range(beta: float, beta_prime: float) -> tuple[float, float]:
    _check_betas(beta, beta_prime)
    r = beta_prime / beta
    return r ** (1 / 3), r ** (2 / 3)


def alpha_from_s(beta: float, beta_prime: float, s: float) -> float:
    return math.sqrt(s) * math.sqrt(beta_prime / beta)


def s_from_alpha(beta: float, beta_prime: float, alpha: float) -> float:
    return alpha * alpha * beta / beta_prime


@dataclass(frozen=True)
class CouplingParams:
    beta: float
    beta_prime: float
    s: float
    gamma: float
    alpha: float
    admissible: bool

    @property
    def laplacian_coef(self) -> float:
        """``a = gamma - s``; zero exactly at the upper end of the s-range."""
        return self.gamma - self.s

    @property
    def potential_coef(self) -> float:
        """``b = gamma - 1/s^2``; zero exactly at the lower end of the s-range."""
        return self.gamma - 1.0 / self.s**2

    def as_dict(self) -> dict:
        return {
            "beta": self.beta,
            "beta_prime": self.beta_prime,
            "s": self.s,
            "gamma": self.gamma,
            "alpha": self.alpha,
            "admissible": self.admissible,
        }


def coupling_from_s(beta: float, beta_prime: float, s: float) -> CouplingParams:
    _check_betas(beta, beta_prime)
    if not s > 0:
        raise InvalidParameterError(f"s must be positive, got {s}")
    lo, hi = admissible_s_range(beta, beta_prime)
    gamma = math.sqrt(beta_prime / (s * beta))
    # Endpoints are compared with a relative slack so that s computed as (b'/b)^(1/3) counts as admissible.
    slack = 1e-12
    admissible = lo * (1 - slack) <= s <= hi * (1 + slack)
    return CouplingParams(beta, beta_prime, s, gamma, s * gamma, admissible)


def coupling_from_alpha(beta: float, beta_prime: float, alpha: float) -> CouplingParams:
    if not alpha > 0:
        raise InvalidParameterError(f"alpha must be positive, got {alpha}")
    return coupling_from_s(beta, beta_prime, s_from_alpha(beta, beta_prime, alpha))


def _clean_coef(x: float, ref: float) -> float:
    # gamma - s and gamma - 1/s^2 vanish at the endpoints up to rounding of the cube roots.
    return 0.0 if abs(x) <= 1e-12 * max(abs(ref), 1.0) else x


def difference_coefficients(params: CouplingParams) -> tuple[float, float]:
    a = _clean_coef(params.laplacian_coef, params.gamma)
    b = _clean_coef(params.potential_coef, params.gamma)
    return a, b


def difference_operator(params: CouplingParams, grid: SaoGrid) -> SaoOperator:
    """``A_{a,b}`` with ``a = gamma - s``, ``b = gamma - 1/s^2``."""
    a, b = difference_coefficients(params)
    return airy_operator(a, b, grid)


def coupled_pair(params: CouplingParams, grid: SaoGrid, noise) -> tuple[TridiagMatrix, TridiagMatrix]:
    """``(gamma H_{beta'}, H_beta^s)`` on one shared noise path."""
    upper = discretize_sao(params.beta_prime, 1.0, grid, noise).matrix.scaled(params.gamma)
    lower = discretize_sao(params.beta, params.s, grid, noise).matrix
    return upper, lower


@dataclass
class DominanceReport:
    params: CouplingParams
    eigen_pairs: np.ndarray  # rows (gamma * lambda'_k, lambda^s_k)
    dominated: np.ndarray
    tol: float
    psd_certificate: PsdCertificate

    @property
    def violations(self) -> int:
        return int(np.count_nonzero(~self.dominated))


def pathwise_spectrum_check(
    stream: RandomStream, params: CouplingParams, grid: SaoGrid, k: int = 5, tol: float = 1e-10
) -> DominanceReport:
    """Compare the ``k`` lowest eigenvalues of ``gamma H_{beta'}`` and ``H_beta^s`` on one path."""
    if k < 1:
        raise InvalidParameterError(f"k must be positive, got {k}")
    noise = sample_noise(stream, grid)
    upper, lower = coupled_pair(params, grid, noise)
    from .tridiag import smallest_eigenvalues

    ru = smallest_eigenvalues(upper, k, tol)
    rl = smallest_eigenvalues(lower, k, tol)
    slack = 2.0 * max(ru.tol, rl.tol)
    pairs = np.column_stack((ru.eigenvalues, rl.eigenvalues))
    dominated = pairs[:, 0] >= pairs[:, 1] - slack
    cert = is_positive_semidefinite(upper - lower, tol=0.0)
    return DominanceReport(params, pairs, dominated, slack, cert)


def coupled_tw_samples(
    stream: RandomStream, params: CouplingParams, grid: SaoGrid, m: int, tol: float = 1e-10
) -> np.ndarray:
    """``m`` pairs ``(t, t')`` with ``t = -s lambda_0(H_beta^s)``, ``t' = -lambda_0(H_{beta'})``.

    ``t`` is a ``TW_beta`` sample and ``t'`` a ``TW_{beta'}`` sample driven by the same
    noise; for admissible parameters ``t >= alpha t'`` on every path.
    """
    if m < 1:
        raise InvalidParameterError(f"m must be positive, got {m}")
    out = np.empty((m, 2))
    for i in range(m):
        noise = sample_noise(stream, grid)
        lam_s = sao_eigenvalues(discretize_sao(params.beta, params.s, grid, noise), 1, tol).eigenvalues[0]
        lam_p = sao_eigenvalues(discretize_sao(params.beta_prime, 1.0, grid, noise), 1, tol).eigenvalues[0]
        out[i] = (-params.s * lam_s, -lam_p)
    return out


@dataclass(frozen=True)
class DominanceTest:
    d_plus: float
    threshold: float
    rejected: bool
    alpha: float
    delta: float
    n_x: int
    n_y: int

    @property
    def verdict(self) -> str:
        return "rejected" if self.rejected else "not rejected"


def dominance_test(x, y, alpha: float, delta: float = 0.05, min_size: int = 100) -> DominanceTest:
    """Test ``X >= alpha Y`` in the first-order stochastic sense.

    ``D+ = sup_t (F_x(t) - F_{alpha y}(t))``; dominance is rejected when ``D+``
    exceeds the sum of the DKW radii of the two samples.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size == 0 or y.size == 0:
        raise InvalidParameterError("dominance test needs nonempty samples")
    if x.size < min_size or y.size < min_size:
        raise InvalidParameterError(f"dominance test needs at least {min_size} samples per side")
    if not alpha > 0:
        raise InvalidParameterError(f"alpha must be positive, got {alpha}")
    d = one_sided_ks(ecdf(x), ecdf(alpha * y))
    thr = dkw_radius(x.size, delta) + dkw_radius(y.size, delta)
    return DominanceTest(d, thr, d > thr, alpha, delta, x.size, y.size)


def tail_theory(beta: float) -> dict:
    """Leading tail exponents: ``2 beta / 3`` (upper, in ``a^{3/2}``) and ``beta / 24`` (lower, in ``a^3``)."""
    return {"upper": 2.0 * beta / 3.0, "lower": beta / 24.0}


@dataclass(frozen=True)
class TailFit:
    side: str
    slope: float
    intercept: float
    n_points: int
    window: tuple[float, float]


def tail_slope(samples, side: str = "upper", fraction: float = 0.1, min_points: int = 5) -> TailFit:
    """Least-squares slope of ``-log P(tail)`` against ``a^{3/2}`` or ``a^3``.

    Upper side fits ``P(X >= a)`` against ``a^{3/2}``; lower side fits
    ``P(X <= -a)`` against ``a^3``. Only ``a > 0`` enters, and of those
    samples the outermost ``fraction`` (by count) form the fit window.
    """
    if side not in ("upper", "lower"):
        raise InvalidParameterError(f"side must be 'upper' or 'lower', got {side!r}")
    if not 0.0 < fraction <= 1.0:
        raise InvalidParameterError(f"fraction must lie in (0, 1], got {fraction}")
    x = np.asarray(samples, dtype=float).ravel()
    n = x.size
    if n == 0:
        raise InsufficientDataError("no samples")
    x = np.sort(x if side == "upper" else -x)
    # Empirical tail P(X >= x_(i)) at each order statistic.
    tail = (n - np.arange(n)) / n
    n_pos = int(np.count_nonzero(x > 0))
    take = int(math.ceil(fraction * n_pos))
    a = x[n - take :]
    p = tail[n - take :]
    # Ties share the largest tail probability.
    a, first = np.unique(a, return_index=True)
    p = p[first]
    if a.size < min_points:
        raise InsufficientDataError(f"only {a.size} distinct tail points in the fit window, need {min_points}")
    u = a**1.5 if side == "upper" else a**3
    slope, intercept = np.polyfit(u, -np.log(p), 1)
    window = (float(a[0]), float(a[-1])) if side == "upper" else (float(-a[-1]), float(-a[0]))
    return TailFit(side, float(slope), float(intercept), int(a.size), window)


def synthetic_tail_samples(c: float, n: int, side: str = "upper", power: float = 1.5) -> np.ndarray:
    """Exact quantiles of the law ``P(X > a) = exp(-c a^power)``, ``a >= 0``.

    Used as a noise-free oracle for :func:`tail_slope`; ``side='lower'`` mirrors the law.
    """
    k = np.arange(1, n + 1)
    a = (-np.log((n + 1 - k) / (n + 1)) / c) ** (1.0 / power)
    return a if side == "upper" else -a[::-1]

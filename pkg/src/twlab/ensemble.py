"""Tridiagonal beta-Hermite ensemble and edge rescalings.

The matrix is ``(1 / sqrt(beta)) T`` with ``T`` diagonal ``N(0, 2)`` and
off-diagonal ``chi_{beta (n - j)}``, ``j = 1..n-1``; its eigenvalues follow
the density proportional to ``exp(-beta sum lambda^2 / 4) prod |lambda_i - lambda_j|^beta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .rng import RandomStream, chi_inverse_cdf, make_stream, sample_chi
from .tridiag import TridiagMatrix, largest_eigenvalues


@dataclass(frozen=True)
class EnsembleSample:
    n: int
    beta: float
    matrix: TridiagMatrix
    eigenvalues: np.ndarray  # descending


def _check(n, beta):
    if n < 1:
        raise InvalidParameterError(f"n must be positive, got {n}")
    if not beta > 0:
        raise InvalidParameterError(f"beta must be positive, got {beta}")


def sample_beta_matrix(stream: RandomStream, n: int, beta: float) -> TridiagMatrix:
    _check(n, beta)
    diag = stream.generator.normal(0.0, math.sqrt(2.0), size=n)
    dofs = beta * np.arange(n - 1, 0, -1, dtype=float)
    off = sample_chi(stream, dofs) if n > 1 else np.zeros(0)
    return TridiagMatrix(diag / math.sqrt(beta), off / math.sqrt(beta))


def sample_beta_ensemble(stream: RandomStream, n: int, beta: float, k: int | None = None) -> EnsembleSample:
    """Sample the ensemble; ``k`` limits how many top eigenvalues are computed."""
    T = sample_beta_matrix(stream, n, beta)
    k = n if k is None else min(k, n)
    eig = largest_eigenvalues(T, k).eigenvalues
    return EnsembleSample(n, beta, T, eig)


def edge_rescale(lam, n: int):
    """``n^{1/6} (2 sqrt(n) - lambda)``; converges to the SAO spectrum."""
    if n < 1:
        raise InvalidParameterError(f"n must be positive, got {n}")
    return n ** (1 / 6) * (2 * math.sqrt(n) - np.asarray(lam, dtype=float))


def edge_rescale_figure(lam, n: int, beta: float):
    """``(lambda - 2 sqrt(n)) n^{1/6} / beta^{2/3}``, the eigenvalue-versus-beta plot scaling."""
    _check(n, beta)
    return (np.asarray(lam, dtype=float) - 2 * math.sqrt(n)) * n ** (1 / 6) / beta ** (2 / 3)


def beta_grid(lo: float = 1.0, hi: float = 30.0, step: float = 0.1) -> np.ndarray:
    count = int(round((hi - lo) / step)) + 1
    return np.round(lo + step * np.arange(count), 10)


def coupled_curves(seed: int, n: int, betas, k: int, stream_id: int = 0) -> list[tuple[float, int, float]]:
    """Top-``k`` rescaled eigenvalues as continuous functions of beta.

    One draw of ``n`` Gaussians and ``n - 1`` uniforms is reused for every
    beta; the off-diagonal chi variates are obtained from the uniforms by
    inverse-CDF transform, so entries move continuously with beta.
    Returns rows ``(beta, index, value)`` with ``index`` starting at 1 for the largest.
    """
    betas = np.asarray(betas, dtype=float)
    if betas.size == 0 or np.any(betas <= 0) or np.any(np.diff(betas) <= 0):
        raise InvalidParameterError("beta grid must be positive and strictly ascending")
    if not 1 <= k <= n:
        raise InvalidParameterError(f"need 1 <= k <= n, got k={k}, n={n}")
    stream = make_stream(seed, stream_id)
    gauss = stream.generator.standard_normal(n)
    unif = stream.generator.random(n - 1)
    unif = np.clip(unif, 1e-300, None)
    rows = []
    for beta in betas:
        diag = math.sqrt(2.0 / beta) * gauss
        off = np.array([chi_inverse_cdf(u, beta * (n - j)) for j, u in enumerate(unif, start=1)]) / math.sqrt(beta)
        lam = largest_eigenvalues(TridiagMatrix(diag, off), k).eigenvalues
        vals = edge_rescale_figure(lam, n, beta)
        rows.extend((float(beta), i + 1, float(v)) for i, v in enumerate(vals))
    return rows


def curves_array(rows, k: int) -> np.ndarray:
    """Reshape ``coupled_curves`` rows into a ``(len(betas), k)`` array."""
    return np.array([r[2] for r in rows]).reshape(-1, k)


def curve_diagnostics(curves: np.ndarray, jump_factor: float = 10.0, window: int = 10) -> dict:
    """Per-curve fraction of decreasing steps and count of outsized jumps.

    A step is a jump when it exceeds ``jump_factor`` times the median
    absolute step over the surrounding ``2 * window + 1`` steps.
    """
    steps = np.diff(curves, axis=0)
    decreasing = (steps < 0).mean(axis=0)
    mag = np.abs(steps)
    jumps = np.zeros(curves.shape[1], dtype=int)
    for t in range(mag.shape[0]):
        local = np.median(mag[max(0, t - window) : t + window + 1], axis=0)
        jumps += mag[t] > jump_factor * local
    return {"decreasing_fraction": decreasing.tolist(), "jumps": jumps.tolist()}

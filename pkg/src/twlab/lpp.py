"""Last-passage percolation on a square under three lattice symmetries.

``identity`` and ``slash`` live on ``[0, N]^2`` with ``p = (0, 0)``,
``q = (N, N)``; ``backslash`` lives on ``[-N, 0] x [0, N]`` with
``p = (-N, 0)``, ``q = (0, N)``. Weights are stored as an ``(N+1, N+1)``
array indexed by offsets from ``p``. Each visited site is counted once,
including sites on a symmetry axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .errors import InvalidParameterError
from .rng import RandomStream


class SymmetryKind(str, Enum):
    IDENTITY = "identity"
    SLASH = "slash"
    BACKSLASH = "backslash"


@dataclass(frozen=True)
class WeightLaw:
    kind: str = "exp"
    q: float | None = None

    def __post_init__(self):
        if self.kind not in ("exp", "geom"):
            raise InvalidParameterError(f"unknown weight law {self.kind!r}")
        if self.kind == "geom" and not (self.q is not None and 0.0 < self.q < 1.0):
            raise InvalidParameterError(f"geometric parameter must lie in (0, 1), got {self.q}")

    @classmethod
    def parse(cls, text: str) -> "WeightLaw":
        """``'exp'`` or ``'geom:q'``."""
        if text == "exp":
            return cls("exp")
        if text.startswith("geom:"):
            try:
                q = float(text.split(":", 1)[1])
            except ValueError as exc:
                raise InvalidParameterError(f"bad geometric parameter in {text!r}") from exc
            return cls("geom", q)
        raise InvalidParameterError(f"weights must be 'exp' or 'geom:q', got {text!r}")

    def sample(self, stream: RandomStream, shape) -> np.ndarray:
        if self.kind == "exp":
            return stream.generator.standard_exponential(shape)
        # Geometric on {0, 1, 2, ...} with P(k) = (1 - q) q^k.
        return (stream.generator.geometric(1.0 - self.q, shape) - 1).astype(float)

    def __str__(self) -> str:
        return "exp" if self.kind == "exp" else f"geom:{self.q}"


@dataclass(frozen=True)
class WeightGrid:
    N: int
    weights: np.ndarray
    law: WeightLaw = WeightLaw()

    def __post_init__(self):
        w = np.ascontiguousarray(self.weights, dtype=float)
        if self.N < 1 or w.shape != (self.N + 1, self.N + 1):
            raise InvalidParameterError(f"weights must have shape ({self.N + 1}, {self.N + 1}), got {w.shape}")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise InvalidParameterError("weights must be finite and nonnegative")
        object.__setattr__(self, "weights", w)

    @classmethod
    def sample(cls, stream: RandomStream, N: int, law: WeightLaw = WeightLaw()) -> "WeightGrid":
        return cls(N, law.sample(stream, (N + 1, N + 1)), law)


def corner(kind: SymmetryKind, N: int) -> tuple[int, int]:
    """Lower-left corner ``p`` of the square used for ``kind``."""
    return (-N, 0) if SymmetryKind(kind) is SymmetryKind.BACKSLASH else (0, 0)


def apply_symmetry(kind: SymmetryKind, i: int, j: int) -> tuple[int, int]:
    kind = SymmetryKind(kind)
    if kind is SymmetryKind.SLASH and j < i:
        return j, i
    if kind is SymmetryKind.BACKSLASH and i + j > 0:
        return -j, -i
    return i, j


def symmetrized_weights(grid: WeightGrid, kind: SymmetryKind) -> np.ndarray:
    """Array ``W[v - p] = w(T(v))`` over the square for ``kind``."""
    kind = SymmetryKind(kind)
    w = grid.weights
    if kind is SymmetryKind.IDENTITY:
        return w
    if kind is SymmetryKind.SLASH:
        return np.where(np.triu(np.ones_like(w, dtype=bool)), w, w.T)
    # Offsets (a, b) = (i + N, j); T reflects a + b > N onto (N - b, N - a).
    N = grid.N
    a, b = np.indices(w.shape)
    above = a + b > N
    out = w.copy()
    out[above] = w[N - b[above], N - a[above]]
    return out


def passage_table(grid: WeightGrid, kind: SymmetryKind) -> np.ndarray:
    """Last-passage values from ``p`` to every site, indexed by offset from ``p``."""
    return _kernels.lpp_table(symmetrized_weights(grid, kind))


def last_passage(grid: WeightGrid, kind: SymmetryKind = SymmetryKind.IDENTITY) -> float:
    return float(passage_table(grid, kind)[-1, -1])


def passage_to_point(grid: WeightGrid, kind: SymmetryKind, target: tuple[int, int]) -> float:
    """Best path weight from ``p`` to ``target`` (square coordinates)."""
    pi, pj = corner(kind, grid.N)
    a, b = target[0] - pi, target[1] - pj
    if not (0 <= a <= grid.N and 0 <= b <= grid.N):
        raise InvalidParameterError(f"target {target} is not reachable from {(pi, pj)} inside the square")
    W = symmetrized_weights(grid, kind)
    return float(_kernels.lpp_table(np.ascontiguousarray(W[: a + 1, : b + 1]))[-1, -1])


def diagonal_offsets(N: int) -> list[tuple[int, int]]:
    """Offsets of the ``y = -x`` diagonal points inside the backslash square."""
    return [(N - t, t) for t in range(N + 1)]


def rescale_lpp(G, N: int, a: float, b: float):
    """``(G - a N) / (b N^{1/3})``."""
    if not b > 0:
        raise InvalidParameterError(f"b must be positive, got {b}")
    return (np.asarray(G, dtype=float) - a * N) / (b * N ** (1 / 3))


# Exponential(1) weights: G(N) ~ 4 N + 2^{4/3} N^{1/3} TW_2.
EXP_CENTERING = (4.0, 2.0 ** (4 / 3))


@dataclass
class CouplingReport:
    N: int
    trials: int
    law: str
    slash_violations: int = 0  # G_identity(N) >= G_slash(N)
    center_violations: int = 0  # G_backslash(N) + w(center) >= 2 G(p -> center)
    reflection_violations: int = 0  # G_backslash(N) == max_d [2 G(p -> d) - w(d)]
    literal_center_violations: int = 0  # 0.5 G_backslash(N) >= G(p -> center), diagonal counted once
    strict_center: int = 0  # trials where the best diagonal point beats the center

    @property
    def total_violations(self) -> int:
        return self.slash_violations + self.center_violations + self.reflection_violations

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "trials": self.trials,
            "weights": self.law,
            "violations": {
                "identity_ge_slash": self.slash_violations,
                "backslash_ge_center": self.center_violations,
                "backslash_reflection": self.reflection_violations,
            },
            "literal_half_backslash_ge_center_failures": self.literal_center_violations,
            "strict_center_trials": self.strict_center,
        }


def check_backslash(grid: WeightGrid, rtol: float = 1e-12) -> tuple[bool, bool, bool, bool]:
    """Reflection checks on one backslash field.

    Returns ``(center_ok, reflection_ok, literal_ok, strict)``.
    """
    N = grid.N
    W = symmetrized_weights(grid, SymmetryKind.BACKSLASH)
    table = _kernels.lpp_table(W)
    G = table[-1, -1]
    diag = diagonal_offsets(N)
    to_diag = np.array([table[a, b] for a, b in diag])
    w_diag = np.array([W[a, b] for a, b in diag])
    c = N // 2
    to_center = table[c, c]
    w_center = W[c, c]
    slack = rtol * max(abs(G), 1.0)
    center_ok = G + w_center >= 2.0 * to_center - slack
    reflection_ok = abs(G - np.max(2.0 * to_diag - w_diag)) <= slack
    literal_ok = 0.5 * G >= to_center - slack
    strict = bool(np.max(to_diag) > to_center + slack)
    return bool(center_ok), bool(reflection_ok), bool(literal_ok), strict


def verify_couplings(stream: RandomStream, N: int, trials: int, law: WeightLaw = WeightLaw()) -> CouplingReport:
    """Pathwise coupling checks over ``trials`` independent weight draws."""
    if N < 2 or N % 2:
        raise InvalidParameterError(f"N must be a positive even integer, got {N}")
    if trials < 1:
        raise InvalidParameterError(f"trials must be positive, got {trials}")
    rep = CouplingReport(N, trials, str(law))
    for _ in range(trials):
        square = WeightGrid.sample(stream, N, law)
        g_id = last_passage(square, SymmetryKind.IDENTITY)
        g_sl = last_passage(square, SymmetryKind.SLASH)
        if g_id < g_sl - 1e-12 * max(g_id, 1.0):
            rep.slash_violations += 1
        center_ok, reflection_ok, literal_ok, strict = check_backslash(WeightGrid.sample(stream, N, law))
        rep.center_violations += not center_ok
        rep.reflection_violations += not reflection_ok
        rep.literal_center_violations += not literal_ok
        rep.strict_center += strict
    return rep


def sample_fluctuations(stream: RandomStream, N: int, trials: int, law: WeightLaw = WeightLaw(),
                        kind: SymmetryKind = SymmetryKind.IDENTITY) -> np.ndarray:
    return np.array([last_passage(WeightGrid.sample(stream, N, law), kind) for _ in range(trials)])


def calibrate_centering(stream: RandomStream, tw_mean: float, tw_sd: float, Ns=(100, 200, 400),
                        trials: int = 500, law: WeightLaw = WeightLaw()) -> tuple[float, float]:
    """Fit ``(a, b)`` so rescaled ``G`` matches a reference mean and spread.

    Per ``N``, ``(E G - a N) / N^{1/3} = b tw_mean`` and ``sd(G) / N^{1/3} = b tw_sd``;
    the stacked system is linear in ``(a, b)`` and solved by least squares.
    """
    rows, rhs = [], []
    for N in Ns:
        G = sample_fluctuations(stream, N, trials, law)
        c = N ** (1 / 3)
        rows.append([N / c, tw_mean])
        rhs.append(G.mean() / c)
        rows.append([0.0, tw_sd])
        rhs.append(G.std(ddof=1) / c)
    (a, b), *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    return float(a), float(b)


def geometric_centering(q: float) -> tuple[float, float]:
    """Centering for geometric weights ``P(k) = (1 - q) q^k``."""
    r = math.sqrt(q)
    return 2 * r / (1 - r), q ** (1 / 6) * (1 + r) ** (1 / 3) / (1 - r)


def centering_for(law: WeightLaw) -> tuple[float, float]:
    return EXP_CENTERING if law.kind == "exp" else geometric_centering(law.q)

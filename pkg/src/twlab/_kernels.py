"""Compiled inner loops: Sturm counts, bisection and last-passage sweeps."""

import numpy as np
from numba import njit

PIVOT_FLOOR = 1e-300


@njit(cache=True, nogil=True)
def sturm_count(diag, off2, x):
    # off2 holds squared off-diagonal entries.
    n = diag.shape[0]
    count = 0
    q = diag[0] - x
    if abs(q) < PIVOT_FLOOR:
        q = PIVOT_FLOOR if q >= 0.0 else -PIVOT_FLOOR
    if q < 0.0:
        count += 1
    for i in range(1, n):
        q = diag[i] - x - off2[i - 1] / q
        if abs(q) < PIVOT_FLOOR:
            q = PIVOT_FLOOR if q >= 0.0 else -PIVOT_FLOOR
        if q < 0.0:
            count += 1
    return count


@njit(cache=True, nogil=True)
def bisect_smallest(diag, off2, k, lo0, hi0, tol):
    """Brackets ``[lo, hi]`` for the ``k`` smallest eigenvalues."""
    lower = np.empty(k)
    upper = np.empty(k)
    lo_start = lo0
    for j in range(k):
        lo = lo_start
        hi = hi0
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if sturm_count(diag, off2, mid) > j:
                hi = mid
            else:
                lo = mid
        lower[j] = lo
        upper[j] = hi
        lo_start = lo
    return lower, upper


@njit(cache=True, nogil=True)
def lpp_table(w):
    """Last-passage values from the corner ``(0, 0)`` to every site of ``w``."""
    n0, n1 = w.shape
    g = np.empty((n0, n1))
    for i in range(n0):
        for j in range(n1):
            if i == 0 and j == 0:
                best = 0.0
            elif i == 0:
                best = g[i, j - 1]
            elif j == 0:
                best = g[i - 1, j]
            else:
                best = max(g[i - 1, j], g[i, j - 1])
            g[i, j] = w[i, j] + best
    return g

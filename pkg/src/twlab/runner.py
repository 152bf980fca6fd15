"""Order-preserving parallel map for Monte Carlo tasks keyed by stream id."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def default_threads() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def parallel_map(fn, items, threads: int | None = None) -> list:
    """``[fn(x) for x in items]``, evaluated on a thread pool.

    Results come back in input order, so output never depends on scheduling.
    """
    items = list(items)
    threads = threads or default_threads()
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))

"""Order-preserving worker pool."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

THREADS_ENV = "FNLS_LAB_THREADS"


def worker_count(default=1):
    """Worker count from ``FNLS_LAB_THREADS`` (falls back to ``default``)."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return default
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return max(1, n)


def ordered_map(fn, items, workers=1):
    """``[fn(x) for x in items]``, optionally on a process pool; result order never depends on ``workers``."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))

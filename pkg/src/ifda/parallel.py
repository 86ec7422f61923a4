"""Optional worker pool capped by the IFDA_THREADS environment variable."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def max_workers() -> int:
    value = os.environ.get("IFDA_THREADS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def thread_map(fn, items):
    """Map preserving order; runs in a capped pool when IFDA_THREADS > 1."""
    items = list(items)
    workers = max_workers()
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))

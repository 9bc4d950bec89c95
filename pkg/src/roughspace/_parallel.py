"""Thread-pool helpers with results independent of the worker count."""

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count():
    raw = os.environ.get("ROUGHSPACE_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def chunk_bounds(n_items, chunk):
    """Fixed chunking of ``range(n_items)``; depends only on ``chunk``."""
    return [(lo, min(lo + chunk, n_items)) for lo in range(0, n_items, chunk)]


def map_chunks(fn, n_items, chunk):
    """Apply ``fn(lo, hi)`` to every chunk and return results in chunk order.

    Each chunk is computed by exactly one worker with the same code path, so
    the concatenated output is bitwise identical for any worker count.
    """
    bounds = chunk_bounds(n_items, chunk)
    workers = min(worker_count(), len(bounds))
    if workers <= 1:
        return [fn(lo, hi) for lo, hi in bounds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda b: fn(*b), bounds))


def rows_per_chunk(n_cols, budget=2_000_000):
    return max(1, budget // max(1, n_cols))

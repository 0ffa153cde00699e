"""Numba threading setup. Imported before numba is first loaded."""
import os
from contextlib import contextmanager

# The pool size is fixed at numba import time; leave headroom so thread
# sweeps above the core count still work.
os.environ.setdefault("NUMBA_NUM_THREADS", str(max(os.cpu_count() or 1, 32)))
os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

import numba  # noqa: E402

MAX_THREADS = numba.config.NUMBA_NUM_THREADS
# Per-thread accumulators sit this many float64 slots apart (one cache line).
PAD = 8


def default_threads() -> int:
    env = os.environ.get("LOUVAIN_THREADS")
    if env:
        return int(env)
    return os.cpu_count() or 1


@contextmanager
def using_threads(count: int, chunk_size: int = 0):
    if count < 1:
        raise ValueError("thread count must be >= 1")
    if count > MAX_THREADS:
        raise ValueError(
            f"{count} threads requested but the pool holds {MAX_THREADS}; "
            "raise NUMBA_NUM_THREADS"
        )
    prev_threads = numba.get_num_threads()
    numba.set_num_threads(count)
    prev_chunk = numba.set_parallel_chunksize(chunk_size)
    try:
        yield
    finally:
        numba.set_parallel_chunksize(prev_chunk)
        numba.set_num_threads(prev_threads)

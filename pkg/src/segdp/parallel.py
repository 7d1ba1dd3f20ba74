"""Worker-pool plumbing for restarts and grid sweeps.

Results are collected in submission order, so a parallel map is
indistinguishable from the serial one. The SEGDP_THREADS environment
variable caps the pool size.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

from .errors import ConfigError


def resolve_workers(requested: int | None = None) -> int:
    cap = os.environ.get("SEGDP_THREADS")
    workers = requested if requested is not None else (os.cpu_count() or 1)
    if cap is not None:
        try:
            cap_value = int(cap)
        except ValueError:
            raise ConfigError(f"SEGDP_THREADS must be an integer, got {cap!r}") from None
        if cap_value < 1:
            raise ConfigError("SEGDP_THREADS must be >= 1")
        workers = min(workers, cap_value)
    return max(1, workers)


def parallel_map(fn, items, workers: int):
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    chunksize = max(1, len(items) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunksize))

"""Thread fan-out for grid sweeps, capped by ``BELLBOUND_THREADS``."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    raw = os.environ.get("BELLBOUND_THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"BELLBOUND_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def map_ordered(fn, items):
    """``list(map(fn, items))`` evaluated in parallel; results keep input order."""
    items = list(items)
    workers = min(worker_count(), len(items)) or 1
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))

"""Optional thread parallelism, capped by the SEMIBOUND_THREADS env var.

All heavy kernels release the GIL inside LAPACK, so threads give real
concurrency.  Results are collected in submission order regardless of the
worker count, keeping outputs deterministic.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def thread_count() -> int:
    raw = os.environ.get("SEMIBOUND_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def pmap(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    seq: Sequence[T] = list(items)
    workers = min(thread_count(), len(seq)) if seq else 1
    if workers <= 1:
        return [fn(x) for x in seq]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, seq))

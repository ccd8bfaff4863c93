"""Deterministic, optional thread parallelism for pure evaluations.

Every computation in this package is a pure function over immutable
values with exact arithmetic, so evaluation order cannot change results.
``parallel_map`` preserves input order, which keeps reports byte-identical
for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

__all__ = ["parallel_map"]


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    """Map ``fn`` over ``items``, optionally on a thread pool, preserving order."""
    seq: Sequence[T] = list(items)
    if workers <= 1 or len(seq) <= 1:
        return [fn(x) for x in seq]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, seq))

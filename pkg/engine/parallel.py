"""
Worker pool helper for embarrassingly parallel enumerations

Tasks are plain callables (often closures over learners), so the pool relies
on the fork start method: the callable is parked in a module global before the
workers are forked and only task indices and results cross process
boundaries. Results come back in submission order, so every reduction runs in
the same order whatever the worker count.
"""
import logging
import multiprocessing
import os
from typing import Callable, List, Optional, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

logger = logging.getLogger(__name__)

_TASK: Optional[Callable] = None
_ITEMS: Sequence = ()


def available_workers() -> int:
    return os.cpu_count() or 1


def _run_index(i: int):
    return _TASK(_ITEMS[i])


def parallel_map(func: Callable[[T], R], items: Sequence[T], workers: int = 1) -> List[R]:
    """Ordered map over items, forked across workers when that is possible"""
    global _TASK, _ITEMS
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    try:
        ctx = multiprocessing.get_context("fork")
    except ValueError:
        logger.warning("fork start method unavailable; running %d tasks serially", len(items))
        return [func(item) for item in items]

    _TASK, _ITEMS = func, items
    try:
        with ctx.Pool(min(workers, len(items))) as pool:
            return pool.map(_run_index, range(len(items)))
    finally:
        _TASK, _ITEMS = None, ()


def chunked(items: Sequence[T], chunks: int) -> List[List[T]]:
    """Split into at most `chunks` contiguous, order-preserving slices"""
    items = list(items)
    chunks = max(1, min(chunks, len(items)))
    size, extra = divmod(len(items), chunks)
    out, start = [], 0
    for c in range(chunks):
        end = start + size + (1 if c < extra else 0)
        out.append(items[start:end])
        start = end
    return [c for c in out if c]

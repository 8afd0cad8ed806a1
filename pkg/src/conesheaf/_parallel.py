"""Deterministic first-hit search over an indexed candidate list."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")


def first_hit(probe: Callable[[int], T | None], n: int, jobs: int = 1) -> tuple[int, T] | None:
    """Smallest ``k < n`` with ``probe(k)`` not None, together with that value.

    Candidates are split into contiguous chunks; the answer does not depend
    on ``jobs`` because the lowest hit of the lowest hitting chunk wins.
    """
    if jobs <= 1 or n < 2:
        for k in range(n):
            res = probe(k)
            if res is not None:
                return k, res
        return None
    chunk = max(1, n // (8 * jobs))
    starts = range(0, n, chunk)

    def scan(start: int):
        for k in range(start, min(start + chunk, n)):
            res = probe(k)
            if res is not None:
                return k, res
        return None

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        for hit in pool.map(scan, starts):
            if hit is not None:
                return hit
    return None


def first_true(pred: Callable[[T], bool], items: Sequence[T], jobs: int = 1) -> int | None:
    hit = first_hit(lambda k: True if pred(items[k]) else None, len(items), jobs)
    return None if hit is None else hit[0]

"""Tiny ordered work-mapping helper.

Grid points within one check are independent and may evaluate
concurrently; results are always reduced in input order so reports are
bit-reproducible regardless of thread count.  Threads share the global
mpmath context: tasks must run under the same PrecisionContext (all
callers here do), and CPython's GIL keeps gains modest; threads > 1 is a
structural knob, not a turbo button.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence


def map_ordered(fn: Callable, items: Sequence, threads: int = 1) -> list:
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))

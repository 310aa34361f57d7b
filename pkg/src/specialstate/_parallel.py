from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")

# Fixed chunk size: the chunk layout, and therefore the floating-point
# arithmetic, never depends on the worker count.
CHUNK = 256


def chunk_slices(n: int, size: int = CHUNK) -> list[slice]:
    return [slice(i, min(i + size, n)) for i in range(0, n, size)]


def map_ordered(fn: Callable[[int], T], count: int, workers: int = 1) -> list[T]:
    """``[fn(0), ..., fn(count - 1)]``, evaluated on up to ``workers`` threads."""
    if workers <= 1 or count <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


def map_chunks(fn: Callable[[slice], T], n: int, workers: int = 1) -> Sequence[T]:
    slices = chunk_slices(n)
    return map_ordered(lambda i: fn(slices[i]), len(slices), workers)

"""Counter-based random streams.

Every random draw in the library comes from a Philox generator whose key is
derived from ``(seed, *counters)``.  A trial therefore sees the same numbers
no matter which thread runs it, or in which order trials are scheduled.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, TypeVar

import numpy as np

T = TypeVar("T")

THREADS_ENV = "SKETCHLAB_THREADS"


def stream(seed: int, *counters: int) -> np.random.Generator:
    """Return the generator for the cell ``(seed, *counters)``."""
    if seed < 0 or any(c < 0 for c in counters):
        raise ValueError("seed and counters must be non-negative")
    key = np.random.SeedSequence(entropy=seed, spawn_key=counters).generate_state(2, np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def thread_count(threads: int | None = None) -> int:
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        if env:
            threads = int(env)
        else:
            threads = os.cpu_count() or 1
    return max(1, int(threads))


def map_trials(fn: Callable[[int], T], trials: int, threads: int | None = None) -> Iterator[T]:
    """Yield ``fn(0), fn(1), ...`` in index order, evaluating in parallel chunks.

    Chunking keeps at most ``2 * threads`` results alive, so large per-trial
    matrices do not pile up in memory.
    """
    workers = thread_count(threads)
    if workers == 1 or trials <= 1:
        for t in range(trials):
            yield fn(t)
        return
    chunk = 2 * workers
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for start in range(0, trials, chunk):
            yield from pool.map(fn, range(start, min(start + chunk, trials)))


def pairwise_sum(items):
    """Sum an iterable with a fixed binary-tree order, streaming.

    The tree shape depends only on the number of items, so the result is
    bit-identical for a given sequence regardless of how it was produced.
    Holds O(log n) partial sums.
    """
    stack: list[tuple[int, object]] = []
    for item in items:
        level, acc = 0, item
        while stack and stack[-1][0] == level:
            _, prev = stack.pop()
            acc = prev + acc
            level += 1
        stack.append((level, acc))
    if not stack:
        raise ValueError("pairwise_sum of an empty sequence")
    total = stack.pop()[1]
    while stack:
        total = stack.pop()[1] + total
    return total

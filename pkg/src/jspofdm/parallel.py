"""Deterministic chunked Monte Carlo.

Work is split into chunks whose size does not depend on the worker count.
Chunk ``i`` draws from ``SeedSequence([seed, *key, i])`` and results are
consumed in chunk order, so the outcome is identical for any ``threads``.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from itertools import count

import numpy as np


def default_threads() -> int:
    return os.cpu_count() or 1


def chunk_rng(seed: int, key, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, key), int(index)]))


def ordered_chunks(fn, seed, key=(), threads=1, n_chunks=None):
    """Yield ``fn(rng, i)`` for chunks ``i = 0, 1, ...`` in order.

    Up to ``threads`` chunks are evaluated concurrently; the caller may stop
    iterating at any point (surplus results of the current wave are dropped).
    """
    threads = max(1, int(threads or 1))
    indices = count() if n_chunks is None else iter(range(n_chunks))
    if threads == 1:
        for i in indices:
            yield fn(chunk_rng(seed, key, i), i)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        while True:
            wave = [i for _, i in zip(range(threads), indices)]
            if not wave:
                return
            futures = [pool.submit(fn, chunk_rng(seed, key, i), i) for i in wave]
            for fut in futures:
                yield fut.result()

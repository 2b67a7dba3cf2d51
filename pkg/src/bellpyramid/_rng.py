"""Chunked, counter-based random streams.

Chunk ``i`` of a run seeded with ``seed`` always draws from the Philox stream
keyed by ``SeedSequence([seed, i])``, so the numbers do not depend on how
chunks are distributed across workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

from .errors import DomainError

DEFAULT_CHUNK = 1 << 20

T = TypeVar("T")


def chunk_generator(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def chunk_sizes(total: int, chunk: int = DEFAULT_CHUNK) -> list[int]:
    if chunk < 1:
        raise DomainError(f"chunk size must be positive, got {chunk}")
    full, rest = divmod(total, chunk)
    return [chunk] * full + ([rest] if rest else [])


def map_chunks(
    fn: Callable[[np.random.Generator, int], T],
    total: int,
    seed: int,
    chunk: int = DEFAULT_CHUNK,
    workers: int = 1,
) -> list[T]:
    """Apply ``fn(rng, size)`` to every chunk; results come back in chunk order."""
    if seed < 0:
        raise DomainError(f"seed must be non-negative, got {seed}")
    sizes = chunk_sizes(total, chunk)

    def run(i: int) -> T:
        return fn(chunk_generator(seed, i), sizes[i])

    if workers <= 1 or len(sizes) <= 1:
        return [run(i) for i in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, range(len(sizes))))

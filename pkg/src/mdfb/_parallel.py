"""Seeded chunking for Monte-Carlo runs.

Trials are cut into fixed-size chunks; chunk ``i`` always draws from the
``i``-th child of ``SeedSequence(seed)``. Results therefore depend only on
``(seed, CHUNK_SIZE)``, never on how many workers evaluated the chunks.
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

CHUNK_SIZE = 1 << 17


def max_workers():
    """Worker cap from ``MDFB_THREADS`` (default: CPU count, at most 8)."""
    env = os.environ.get("MDFB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def chunk_sizes(n, chunk=CHUNK_SIZE):
    full, rest = divmod(n, chunk)
    return [chunk] * full + ([rest] if rest else [])


def chunk_rngs(seed, n, chunk=CHUNK_SIZE):
    """List of ``(size, Generator)`` pairs covering ``n`` trials."""
    sizes = chunk_sizes(n, chunk)
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = root.spawn(len(sizes))
    return [(s, np.random.default_rng(c)) for s, c in zip(sizes, children)]


def map_chunks(fn, seed, n, chunk=CHUNK_SIZE):
    """Evaluate ``fn(index, size, rng)`` on every chunk, returning results in chunk order."""
    jobs = [(i, s, r) for i, (s, r) in enumerate(chunk_rngs(seed, n, chunk))]
    workers = min(max_workers(), len(jobs))
    if workers <= 1:
        return [fn(*job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))

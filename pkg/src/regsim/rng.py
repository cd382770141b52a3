"""Reproducible random streams for trajectory sampling.

Sampling is split into fixed-size chunks and every chunk draws from its
own counter-based Philox stream keyed by ``(seed, chunk index)``.  Within
a chunk the samplers consume numbers in lockstep columns, so a sample's
randomness is a function of the seed and its global index alone: workers
can split on chunk boundaries and a parallel run merges to bit-identical
statistics with a serial one.

``CHUNK_SIZE`` is part of the keying scheme.  Changing it re-partitions
the sample space and legitimately changes individual draws, which is why
it is a module constant and not a per-call knob for production use.
"""

import numpy as np

CHUNK_SIZE = 16384


def chunk_streams(seed, n_samples, chunk_size=CHUNK_SIZE):
    """Yield ``(start, stop, generator)`` triples covering ``range(n_samples)``.

    Each generator is an independent Philox stream keyed by
    ``(seed, chunk_index)`` and owns the samples ``start <= i < stop``.
    """
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed {seed} does not fit in a u64")
    if n_samples < 0:
        raise ValueError("n_samples must be non-negative")
    if chunk_size <= 0:
        raise ValueError("chunk_size must be positive")
    for index, start in enumerate(range(0, n_samples, chunk_size)):
        key = np.array([seed, index], dtype=np.uint64)
        gen = np.random.Generator(np.random.Philox(key=key))
        yield start, min(start + chunk_size, n_samples), gen

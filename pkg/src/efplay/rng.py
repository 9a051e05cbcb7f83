"""Reproducible random streams derived from one root seed.

Every consumer of randomness asks for a stream keyed by a tuple of integers
(phase, epoch, ...). Streams are built with ``numpy.random.SeedSequence``
spawn keys, so two different keys never share state and the order in which
streams are created has no effect on what they produce.
"""

import numpy as np

# Phase tags used as the first element of a stream key.
INIT = 0
INNER = 1
REPLACE = 2
MFLD = 3
EXACT = 4
REFERENCE = 5

_MASK64 = (1 << 64) - 1


def rng_stream(seed: int, *stream_id: int) -> np.random.Generator:
    """Return the generator for ``(seed, stream_id...)``.

    The same arguments always give the same sequence; different ids give
    independent sequences.
    """
    seed = int(seed)
    if seed < 0 or seed > _MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    key = tuple(int(s) & _MASK64 for s in stream_id)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))

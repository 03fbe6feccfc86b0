"""Deterministic random streams.

All randomness in the package flows from 64-bit master seeds through the
counter-based Philox4x64-10 generator (numpy implementation).  Stream ``j``
of master seed ``s`` uses the Philox key ``(s mod 2**64, j)``, so any
sub-computation is reproducible from the pair ``(seed, stream)`` alone and
independent streams never overlap.
"""

from __future__ import annotations

import numpy as np

GENERATOR_NAME = "philox4x64-10(numpy)"

# Fixed stream indices, one per purpose, so different draws fed from the
# same master seed can never overlap.
STREAM_HAAR = 0           # Haar unitary / isometry entries
STREAM_INPUTS = 1         # random channel input vectors
STREAM_PROBES = 2         # simplex probe sampling
STREAM_RESTART_BASE = 16  # optimizer restart j uses STREAM_RESTART_BASE + j

_MASK64 = (1 << 64) - 1


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Generator for stream `index` of master seed `seed` (both 64-bit)."""
    key = np.array([seed & _MASK64, index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex Gaussian array: (X + iY)/sqrt(2), X,Y ~ N(0,1)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)

"""Deterministic random substreams built on counter-based Philox.

Every stochastic consumer (measurement sampling, trajectory noise,
twirling draws, readout flips, restart initialization) derives its own
generator from ``(seed, path...)`` where the path encodes a stream tag
and, usually, a shot or restart index. A shot's randomness is therefore
a pure function of ``(seed, stream, shot)``: results never depend on
evaluation order, and re-running any prefix of the work reproduces the
same numbers.
"""

from __future__ import annotations

import numpy as np

# Stream tags keep substreams for different purposes disjoint even when
# they share a master seed and shot index.
STREAM_SAMPLE = 1
STREAM_TRAJECTORY = 2
STREAM_READOUT = 3
STREAM_TWIRL = 4
STREAM_INIT = 5
STREAM_EVAL = 6
STREAM_FINAL = 7
STREAM_CELL = 8

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(x: int) -> int:
    """SplitMix64 finalizer: a bijective avalanche of one 64-bit word."""
    x = (x + _GOLDEN) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_key(seed: int, *path: int) -> int:
    """Collapse ``(seed, path...)`` into a single 64-bit Philox key.

    Path components are mixed in sequentially, so ``(s, a, b)`` and
    ``(s, b, a)`` land in different streams.
    """
    h = _mix64(seed & _MASK64)
    for part in path:
        h = _mix64(h ^ _mix64(part & _MASK64))
    return h


def generator(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for the substream named by ``path``."""
    return np.random.Generator(np.random.Philox(key=derive_key(seed, *path)))


def child_seed(seed: int, *path: int) -> int:
    """A 64-bit seed for handing to APIs that take their own seed."""
    return derive_key(seed, *path)

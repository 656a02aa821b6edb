"""Small deterministic RNG utilities.

Two layers of randomness exist in the toolkit:

* Synthetic data is drawn from numpy's counter-based Philox4x64 generator,
  keyed by a ``(seed, stream)`` pair (see :mod:`crossmmd.datagen`).
* Index shuffles (permutation tests, optional split pre-shuffles) use a
  splitmix64 stream so the exact same integer sequence is reproducible in
  both the numba and the pure-numpy backend.

Per-task streams are derived with :func:`mix64`, a splitmix64 scramble of
``seed + (index + 1) * GOLDEN``; results therefore do not depend on the
order in which tasks are scheduled.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def sm64_scramble(z: int) -> int:
    """splitmix64 output function (Steele, Lea & Flood 2014)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


def mix64(seed: int, index: int) -> int:
    """Derive an independent 64-bit stream id for (seed, index)."""
    return sm64_scramble((seed + ((index + 1) * GOLDEN)) & MASK64)


def substream(*indices: int) -> int:
    """Fold an index path (size, arm, trial, ...) into one stream id."""
    s = 0
    for i in indices:
        s = mix64(s, i)
    return s


def shuffled_indices(count: int, stream: int) -> list[int]:
    """Fisher-Yates shuffle of range(count) driven by a splitmix64 stream.

    Must stay in lockstep with the numba implementation in
    ``crossmmd._accel._numba_impl``; both are covered by a cross-check test.
    """
    idx = list(range(count))
    state = stream & MASK64
    for i in range(count - 1, 0, -1):
        state = (state + GOLDEN) & MASK64
        r = sm64_scramble(state)
        j = r % (i + 1)
        idx[i], idx[j] = idx[j], idx[i]
    return idx

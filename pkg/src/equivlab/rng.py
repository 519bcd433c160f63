"""Seeded uniform streams: xoshiro256** with its state filled by splitmix64.

Both generators are the public-domain reference algorithms by Blackman and
Vigna. A stream is a pure function of its 64-bit seed, so any estimate built
on it is reproducible bit-for-bit.
"""

from __future__ import annotations

import numba
import numpy as np

ALGORITHM_ID = "xoshiro256**/splitmix64-seeded, 53-bit doubles, v1"

_MASK = (1 << 64) - 1


def splitmix64_sequence(seed: int, count: int) -> list[int]:
    """First ``count`` outputs of splitmix64 started at ``seed``."""
    state = seed & _MASK
    out = []
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & _MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        out.append(z ^ (z >> 31))
    return out


def initial_state(seed: int) -> np.ndarray:
    return np.array(splitmix64_sequence(seed, 4), dtype=np.uint64)


@numba.njit(cache=True)
def _rotl(x, k):
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


@numba.njit(cache=True)
def _fill_uniform(state, out):
    s0, s1, s2, s3 = state[0], state[1], state[2], state[3]
    scale = 1.0 / 9007199254740992.0  # 2**-53
    for i in range(out.shape[0]):
        result = _rotl(s1 * np.uint64(5), 7) * np.uint64(9)
        t = s1 << np.uint64(17)
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        out[i] = np.float64(result >> np.uint64(11)) * scale
    state[0], state[1], state[2], state[3] = s0, s1, s2, s3


class Xoshiro256:
    """Sequential uniform stream on ``[0, 1)`` with 53-bit resolution."""

    algorithm = ALGORITHM_ID

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._state = initial_state(self.seed)

    def uniform(self, n: int) -> np.ndarray:
        out = np.empty(int(n), dtype=np.float64)
        if n:
            _fill_uniform(self._state, out)
        return out


def uniform_stream(seed: int, n: int) -> np.ndarray:
    """The first ``n`` uniforms of the stream for ``seed``."""
    return Xoshiro256(seed).uniform(n)


# a fixed panel used wherever an almost-sure statement is checked by a seed sweep
SEED_PANEL: tuple[int, ...] = tuple(range(1, 65))

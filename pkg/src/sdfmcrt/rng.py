"""xoshiro256** streams usable from inside kernels.

A stream is a ``uint64[4]`` state array. Worker streams are derived from
``(seed, worker_index)`` through :class:`numpy.random.SeedSequence`, so a run
is reproducible for a fixed seed and worker count.
"""
from __future__ import annotations

import numpy as np

from ._jit import NUMBA_ENABLED, njit

_MASK = (1 << 64) - 1
_INV_2_53 = 1.0 / 9007199254740992.0


@njit
def _rotl_jit(x, k):
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


@njit
def _next_u64_jit(s):
    s0 = s[0]
    s1 = s[1]
    result = _rotl_jit(s1 * np.uint64(5), 7) * np.uint64(9)
    t = s1 << np.uint64(17)
    s[2] ^= s0
    s[3] ^= s1
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl_jit(s[3], 45)
    return result


@njit
def _uniform_jit(s):
    return float(_next_u64_jit(s) >> np.uint64(11)) * _INV_2_53


def _rotl_py(x, k):
    return ((x << k) | (x >> (64 - k))) & _MASK


def _next_u64_py(s):
    # Python ints: numpy uint64 scalars warn on wraparound.
    s0, s1, s2, s3 = int(s[0]), int(s[1]), int(s[2]), int(s[3])
    result = (_rotl_py((s1 * 5) & _MASK, 7) * 9) & _MASK
    t = (s1 << 17) & _MASK
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl_py(s3, 45)
    s[0], s[1], s[2], s[3] = s0, s1, s2, s3
    return result


def _uniform_py(s):
    return float(_next_u64_py(s) >> 11) * _INV_2_53


if NUMBA_ENABLED:
    next_u64 = _next_u64_jit
    uniform = _uniform_jit
else:
    next_u64 = _next_u64_py
    uniform = _uniform_py


@njit
def uniform_open_closed(s):
    """Uniform on (0, 1]."""
    return 1.0 - uniform(s)


@njit
def _fill_uniform(s, out):
    for i in range(out.shape[0]):
        out[i] = uniform(s)


def stream_state(seed: int, index: int = 0) -> np.ndarray:
    """Deterministic xoshiro state for stream ``index`` of ``seed``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),))
    state = ss.generate_state(4, dtype=np.uint64)
    if not state.any():  # all-zero is the one forbidden xoshiro state
        state[0] = 1
    return state


class RandomStream:
    """Python handle on one xoshiro256** stream.

    The ``state`` array is what kernels consume; calling kernels with it
    advances this stream in place.
    """

    def __init__(self, seed: int = 0, index: int = 0):
        self.state = stream_state(seed, index)

    def uniform(self) -> float:
        return uniform(self.state)

    def uniforms(self, n: int) -> np.ndarray:
        out = np.empty(int(n))
        _fill_uniform(self.state, out)
        return out

    def __repr__(self):
        return f"RandomStream(state={[int(v) for v in self.state]})"

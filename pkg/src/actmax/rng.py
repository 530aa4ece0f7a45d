"""Counter-seeded xoshiro256++ streams for the compiled kernels.

Every sampling task (a pool-fill chunk, a stopping-estimator call, a forward
Monte Carlo chunk) owns a private stream identified by (master_seed, stream_id).
Streams are seeded through splitmix64, so results depend only on the ids a task
consumed, never on thread scheduling. This is what makes single-seed runs
byte-reproducible and keeps multi-worker pool fills independent of the worker
count.

Stream setup runs in plain Python on full-range 64-bit ints (numba would
coerce scalar arguments to int64 and reject seeds above 2**63); the per-draw
generator functions are compiled and operate on the 4-word state array.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U64 = np.uint64
_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV53 = 1.0 / (1 << 53)


def _splitmix64_py(state: int) -> tuple[int, int]:
    """One splitmix64 step on Python ints; returns (new_state, output)."""
    state = (state + _GOLDEN) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return state, z ^ (z >> 31)


def stream_state(master_seed: int, stream_id: int) -> np.ndarray:
    """Derive the 4-word xoshiro256++ state for one stream."""
    sm = (master_seed & _MASK) ^ ((((stream_id & _MASK) + 1) * _GOLDEN) & _MASK)
    out = np.empty(4, dtype=np.uint64)
    for i in range(4):
        sm, word = _splitmix64_py(sm)
        out[i] = word
    if not out.any():
        out[0] = 1  # all-zero state is the one forbidden xoshiro state
    return out


def mix_seed(master_seed: int, salt: int) -> int:
    """One-off deterministic derivation of a child seed (used per experiment row)."""
    sm = (master_seed & _MASK) ^ ((((salt & _MASK) + 1) * _GOLDEN) & _MASK)
    _, word = _splitmix64_py(sm)
    return word


@njit(cache=True, nogil=True)
def next_u64(s):
    x = s[0] + s[3]
    result = ((x << U64(23)) | (x >> U64(41))) + s[0]
    t = s[1] << U64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = (s[3] << U64(45)) | (s[3] >> U64(19))
    return result


@njit(cache=True, nogil=True)
def next_f64(s):
    """Uniform draw in [0, 1) with 53 random bits."""
    return (next_u64(s) >> U64(11)) * _INV53

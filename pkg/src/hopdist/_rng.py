"""Counter-based RNG helpers for the numba kernels.

splitmix64 streams: cheap, stateless seeding, bit-reproducible across runs
and platforms. All helpers thread the uint64 state through return values
(numba cannot mutate scalar arguments in place).
"""
from __future__ import annotations

import numpy as np
from numba import njit

U64 = np.uint64

_SM_GAMMA = U64(0x9E3779B97F4A7C15)
_SM_MUL1 = U64(0xBF58476D1CE4E5B9)
_SM_MUL2 = U64(0x94D049BB133111EB)
_STREAM_MUL = U64(0xD1342543DE82EF95)
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


@njit(cache=True)
def next_u64(state):
    """Advance the splitmix64 state; returns (value, new_state)."""
    state = state + _SM_GAMMA
    z = state
    z = (z ^ (z >> U64(30))) * _SM_MUL1
    z = (z ^ (z >> U64(27))) * _SM_MUL2
    z = z ^ (z >> U64(31))
    return z, state


@njit(cache=True)
def next_unit(state):
    """Uniform float64 in [0, 1); returns (value, new_state)."""
    z, state = next_u64(state)
    return float(z >> U64(11)) * _INV_2_53, state


@njit(cache=True)
def next_below(state, n):
    """Uniform int in [0, n); returns (value, new_state)."""
    u, state = next_unit(state)
    j = int(u * n)
    if j >= n:  # u*n can round up to n when n is a power of two
        j = n - 1
    return j, state


@njit(cache=True)
def stream_state(seed, stream):
    """Initial state for an independent stream keyed by (seed, stream)."""
    s = U64(seed) * _SM_GAMMA + U64(stream) * _STREAM_MUL + _SM_MUL2
    _, s = next_u64(s)
    _, s = next_u64(s)
    return s

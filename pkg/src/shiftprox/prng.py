"""Deterministic xoshiro256** generator for reproducible instances.

State transition (all arithmetic modulo 2**64), matching the reference
C implementation by Blackman and Vigna::

    result = rotl(s1 * 5, 7) * 9
    t = s1 << 17
    s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3
    s2 ^= t
    s3 = rotl(s3, 45)

The 256-bit state is expanded from a 64-bit seed by four successive
splitmix64 outputs. ``uniform01`` keeps the top 53 bits of one output,
so every double in ``[0, 1)`` on the 2**-53 lattice is reachable and 1.0
never is. Matrices are filled row-major.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_TWO_M53 = 1.0 / (1 << 53)


def splitmix64(x: int) -> tuple[int, int]:
    """One splitmix64 step. Returns ``(new_state, output)``."""
    x = (x + _GOLDEN_GAMMA) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return x, z ^ (z >> 31)


def split_seed(seed: int, stream: int) -> int:
    """Derive the seed of an independent sub-stream.

    The derived seed is the splitmix64 output obtained after advancing
    ``seed`` by ``stream + 1`` golden-gamma increments; stream 0 and the
    parent seed therefore never coincide.
    """
    if stream < 0:
        raise ValueError("stream index must be nonnegative")
    state = (seed + stream * _GOLDEN_GAMMA) & MASK64
    _, out = splitmix64(state)
    return out


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class SeededGenerator:
    """xoshiro256** stream seeded from a 64-bit integer.

    A generator is single-owner; use :func:`split_seed` to obtain seeds for
    concurrent streams.
    """

    def __init__(self, seed: int):
        if not 0 <= seed <= MASK64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
        self.seed = seed
        sm = seed
        state = []
        for _ in range(4):
            sm, out = splitmix64(sm)
            state.append(out)
        if not any(state):  # all-zero state is a fixed point
            state[0] = 1
        self._s = state

    @property
    def state(self) -> tuple[int, int, int, int]:
        return tuple(self._s)

    @classmethod
    def from_state(cls, state) -> "SeededGenerator":
        g = cls.__new__(cls)
        g.seed = None
        g._s = [int(v) & MASK64 for v in state]
        if len(g._s) != 4 or not any(g._s):
            raise ValueError("state must be four words, not all zero")
        return g

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def uniform01(self) -> float:
        return (self.next_u64() >> 11) * _TWO_M53

    def uniform_array(self, size: int) -> np.ndarray:
        # Inlined copy of next_u64 for speed; must stay in sync with it.
        s0, s1, s2, s3 = self._s
        out = [0.0] * size
        m = MASK64
        for i in range(size):
            r = (s1 * 5) & m
            r = (((r << 7) | (r >> 57)) & m) * 9 & m
            out[i] = (r >> 11) * _TWO_M53
            t = (s1 << 17) & m
            s2 ^= s0
            s3 ^= s1
            s1 ^= s2
            s0 ^= s3
            s2 ^= t
            s3 = ((s3 << 45) | (s3 >> 19)) & m
        self._s = [s0, s1, s2, s3]
        return np.asarray(out, dtype=np.float64)


def uniform01(g: SeededGenerator) -> float:
    return g.uniform01()


def fill_matrix(g: SeededGenerator, rows: int, cols: int) -> np.ndarray:
    """``rows x cols`` matrix of uniform draws, filled row by row."""
    if rows < 1 or cols < 1:
        raise ValueError(f"matrix shape must be positive, got {rows}x{cols}")
    return g.uniform_array(rows * cols).reshape(rows, cols)


def fill_vector(g: SeededGenerator, size: int) -> np.ndarray:
    if size < 1:
        raise ValueError(f"vector size must be positive, got {size}")
    return g.uniform_array(size)

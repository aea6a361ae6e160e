"""Philox4x64-10 counter-based generator (Salmon et al., SC'11).

Stream layout, pinned so any implementation can reproduce the draws:

* key = (splitmix64_mix(master_seed), stream_index), where splitmix64_mix is
  the SplitMix64 output finalizer (Steele, Lea & Flood 2014);
* uniform number ``i`` of a stream is word ``i % 4`` of the Philox block
  with counter ``(i // 4, 0, 0, 0)``;
* a 64-bit word ``w`` maps to ``((w >> 11) + 0.5) * 2**-53``, which lies in
  the open interval (0, 1).

The block function is bit-identical to Random123 and to numpy's
``np.random.Philox``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

__all__ = ["RandomStream", "philox4x64", "splitmix64_mix"]

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_LO32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_S11 = np.uint64(11)
_ZERO = np.uint64(0)
_TWO_M53 = 1.0 / 9007199254740992.0

_U64 = (1 << 64) - 1


@njit(cache=True, nogil=True, inline="always")
def _mulhilo(a, b):
    lo = a * b
    a0 = a & _LO32
    a1 = a >> _S32
    b0 = b & _LO32
    b1 = b >> _S32
    p00 = a0 * b0
    p01 = a0 * b1
    p10 = a1 * b0
    mid = (p00 >> _S32) + (p01 & _LO32) + (p10 & _LO32)
    hi = a1 * b1 + (p01 >> _S32) + (p10 >> _S32) + (mid >> _S32)
    return hi, lo


@njit(cache=True, nogil=True)
def _philox(c0, c1, c2, c3, k0, k1):
    for _ in range(10):
        hi0, lo0 = _mulhilo(_M0, c0)
        hi1, lo1 = _mulhilo(_M1, c2)
        c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
        k0 = k0 + _W0
        k1 = k1 + _W1
    return c0, c1, c2, c3


@njit(cache=True, nogil=True)
def _fill_uniforms(k0, k1, start, out):
    """Write uniforms ``start .. start + len(out)`` of stream (k0, k1) into ``out``."""
    count = out.shape[0]
    i = 0
    idx = start
    while i < count:
        block = np.uint64(idx >> 2)
        w0, w1, w2, w3 = _philox(block, _ZERO, _ZERO, _ZERO, k0, k1)
        word = idx & 3
        while word < 4 and i < count:
            if word == 0:
                w = w0
            elif word == 1:
                w = w1
            elif word == 2:
                w = w2
            else:
                w = w3
            out[i] = ((w >> _S11) + 0.5) * _TWO_M53
            i += 1
            idx += 1
            word += 1


@njit(cache=True, nogil=True)
def _fill_uniforms_aligned(k0, k1, out):
    """Uniforms 0 .. len(out) - 1; the fast path used by the simulation."""
    count = out.shape[0]
    full = count >> 2
    for b in range(full):
        w0, w1, w2, w3 = _philox(np.uint64(b), _ZERO, _ZERO, _ZERO, k0, k1)
        j = 4 * b
        out[j] = ((w0 >> _S11) + 0.5) * _TWO_M53
        out[j + 1] = ((w1 >> _S11) + 0.5) * _TWO_M53
        out[j + 2] = ((w2 >> _S11) + 0.5) * _TWO_M53
        out[j + 3] = ((w3 >> _S11) + 0.5) * _TWO_M53
    rest = count - 4 * full
    if rest:
        w0, w1, w2, w3 = _philox(np.uint64(full), _ZERO, _ZERO, _ZERO, k0, k1)
        j = 4 * full
        out[j] = ((w0 >> _S11) + 0.5) * _TWO_M53
        if rest > 1:
            out[j + 1] = ((w1 >> _S11) + 0.5) * _TWO_M53
        if rest > 2:
            out[j + 2] = ((w2 >> _S11) + 0.5) * _TWO_M53


def philox4x64(counter: tuple[int, int, int, int], key: tuple[int, int]) -> tuple[int, int, int, int]:
    """One Philox4x64-10 block as Python ints."""
    c = [np.uint64(v & _U64) for v in counter]
    k = [np.uint64(v & _U64) for v in key]
    return tuple(int(w) for w in _philox(c[0], c[1], c[2], c[3], k[0], k[1]))


def splitmix64_mix(z: int) -> int:
    z &= _U64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class RandomStream:
    """Substream ``stream_index`` of the family selected by ``master_seed``.

    Streams never share state, so any subset can be consumed in any order or
    concurrently; a single stream object is just a key and is safe to copy.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.master_seed <= _U64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        if not 0 <= self.stream_index <= _U64:
            raise ValueError("stream_index must be an unsigned 64-bit integer")

    @property
    def key(self) -> tuple[int, int]:
        return splitmix64_mix(self.master_seed), self.stream_index

    def uniforms(self, count: int, start: int = 0) -> np.ndarray:
        if count < 0 or start < 0:
            raise ValueError("count and start must be nonnegative")
        out = np.empty(count, dtype=np.float64)
        k0, k1 = self.key
        _fill_uniforms(np.uint64(k0), np.uint64(k1), start, out)
        return out

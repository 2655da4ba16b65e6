"""Pinned randomness policy.

Every random quantity in this package flows from a 64-bit seed through two
fixed algorithms, so that runs replay bit-identically:

* Bit stream: Philox 4x64 (``numpy.random.Philox``) keyed with the seed.
* Gaussian variates: Box-Muller applied to consecutive uniforms from that
  stream (the numpy ziggurat sampler is deliberately not used).
* Stream derivation for sweep points / repeats: ``derive_stream(seed, k)``
  returns the k-th output of the splitmix64 sequence started at ``seed``,
  i.e. ``mix64(seed + (k + 1) * 0x9E3779B97F4A7C15)`` with the standard
  splitmix64 finalizer ``mix64``.

Sub-streams derived this way are independent of scheduling order, so sweep
points may run concurrently without changing any result.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """Standard splitmix64 finalizer on a 64-bit integer."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def derive_stream(seed: int, index: int) -> int:
    """Seed for sub-stream ``index``: output ``index`` of the splitmix64 sequence at ``seed``."""
    if index < 0:
        raise ValueError("stream index must be nonnegative")
    return splitmix64((seed + (index + 1) * _GOLDEN) & _MASK64)


def generator(seed: int) -> np.random.Generator:
    """Philox 4x64 generator keyed with ``seed``."""
    return np.random.Generator(np.random.Philox(key=seed & _MASK64))


def standard_normal(gen: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """N(0,1) variates by Box-Muller on the Philox uniform stream.

    Draws two uniform arrays u1, u2 in [0, 1) and returns
    sqrt(-2 ln(1 - u1)) * cos(2 pi u2); 1 - u1 lies in (0, 1] so the log is
    finite. The sine partner is discarded to keep the consumption rule simple
    (two uniforms per variate).
    """
    u1 = gen.random(shape)
    u2 = gen.random(shape)
    return np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)


def complex_normal(gen: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """Complex Gaussians with independent N(0,1) real and imaginary parts.

    One Box-Muller pair per entry: the cosine branch becomes the real part
    and the sine branch the imaginary part.
    """
    u1 = gen.random(shape)
    u2 = gen.random(shape)
    r = np.sqrt(-2.0 * np.log1p(-u1))
    return r * np.cos(2.0 * np.pi * u2) + 1j * r * np.sin(2.0 * np.pi * u2)

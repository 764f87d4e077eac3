"""Deterministic bit mixing for seed-derived noise.

Corruptions must behave as fixed functions of ``(t, y)``: evaluating twice
at the same point has to give the same value, with no hidden generator
state. That rules out consuming a stream RNG inside the integration loop,
so instead every evaluation hashes the IEEE-754 bit patterns of its inputs
through a splitmix64-style finalizer and turns the digest into floats.
"""
from __future__ import annotations

import struct

_MASK = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """Scramble a 64-bit word (splitmix64 finalizer)."""
    z &= _MASK
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK
    return z ^ (z >> 31)


def float_bits(x: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", float(x)))[0]


def derive_seed(seed: int, index: int) -> int:
    """A stream of decorrelated child seeds from one parent seed."""
    return mix64((seed & _MASK) ^ mix64((index + _GOLDEN) & _MASK))


def hash_point(seed: int, t: float, coords) -> int:
    """Digest of a space-time point, keyed by ``seed``.

    Distinct ``(t, y)`` bit patterns give independent-looking digests, and
    equal ones collide by construction, which is exactly the function
    semantics the corruptions need.
    """
    h = mix64((seed & _MASK) ^ _GOLDEN)
    h = mix64(h ^ float_bits(t))
    for c in coords:
        h = mix64(h ^ float_bits(c))
    return h


def unit_open(h: int) -> float:
    """Map a digest to [0, 1) with 53-bit resolution."""
    return (h >> 11) * 2.0**-53


def signed_unit(h: int) -> float:
    """Map a digest to (-1, 1); magnitude strictly below 1."""
    u = ((h >> 11) & ((1 << 52) - 1)) * 2.0**-52
    return u if h & 1 else -u


def gauss(h: int) -> tuple[float, float]:
    """Two standard normals from one digest (Box-Muller)."""
    import math

    h2 = mix64(h ^ _GOLDEN)
    u1 = ((h >> 11) + 1) * 2.0**-53
    u2 = (h2 >> 11) * 2.0**-53
    r = math.sqrt(-2.0 * math.log(u1))
    return r * math.cos(2.0 * math.pi * u2), r * math.sin(2.0 * math.pi * u2)

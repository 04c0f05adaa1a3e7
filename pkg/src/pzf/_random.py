"""Keyed 64-bit mixing used for every random draw in the package.

Draws are pure functions of ``(seed, key...)`` so that replays, coupled runs
and parallel workers see identical randomness regardless of evaluation order.
The compiled kernels implement the same functions bit-for-bit.
"""
from __future__ import annotations

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

#: key tag separating window-chain draws from pzf edge draws
CHAIN_TAG = 0x57494E444F57


def splitmix64(x: int) -> int:
    z = (x + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def round_key(seed: int, t: int) -> int:
    """Prefix hash shared by all draws of round ``t``."""
    return splitmix64(splitmix64(seed & MASK64) ^ (t & MASK64))


def edge_bits(seed: int, t: int, u: int, v: int) -> int:
    """Uniform 64-bit word for the attempt of ``u`` to force ``v`` in round ``t``."""
    return splitmix64(splitmix64(round_key(seed, t) ^ u) ^ v)


def chain_bits(seed: int, step: int, slot: int) -> int:
    """Uniform 64-bit word for draw ``slot`` of window-chain step ``step``."""
    return edge_bits(seed, step, slot, CHAIN_TAG)


def derive_seed(master: int, index: int) -> int:
    """Child seed for trial/experiment ``index`` under ``master``."""
    return splitmix64(splitmix64(master & MASK64) ^ (index & MASK64))


def force_threshold(k: int, deg: int) -> int:
    """Smallest word ``T`` with ``U < T  <=>  U / 2**64 < k / deg``.

    Only meaningful for ``k < deg``; callers treat ``k >= deg`` as a sure force.
    """
    return -((-k << 64) // deg)


def fires(bits: int, k: int, deg: int) -> bool:
    return k >= deg or bits < force_threshold(k, deg)


def uniform01(bits: int) -> float:
    return bits / 2.0**64

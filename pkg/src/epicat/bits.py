"""Small helpers for sets encoded as Python int bitmasks."""

from __future__ import annotations

from typing import Iterable, Iterator


def full_mask(n: int) -> int:
    return (1 << n) - 1


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the indices of set bits in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits_list(mask: int) -> list[int]:
    return list(iter_bits(mask))


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def is_subset(small: int, big: int) -> bool:
    return small & ~big == 0

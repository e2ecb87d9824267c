"""Integer-backed bitsets over dense id spaces.

Python ints give word-parallel AND/OR at arbitrary width, which keeps the
hot set-intersection path fast without any extra dependency.
"""

from __future__ import annotations

import numpy as np


def full_mask(n: int) -> int:
    """Bitset with bits 0..n-1 all set."""
    return (1 << n) - 1


def from_indices(indices, n: int) -> int:
    """Create a bitset from an iterable of bit indices."""
    bs = 0
    for i in indices:
        if not 0 <= i < n:
            raise IndexError(f"bit index {i} out of range for width {n}")
        bs |= 1 << i
    return bs


def from_bool_array(mask: np.ndarray) -> int:
    """Pack a 1-d boolean array into a bitset (index i -> bit i)."""
    packed = np.packbits(np.ascontiguousarray(mask, dtype=bool), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def to_bool_array(bs: int, n: int) -> np.ndarray:
    """Unpack a bitset into a boolean array of length n."""
    nbytes = (n + 7) // 8
    raw = np.frombuffer(bs.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little", count=n).astype(bool)


def to_indices(bs: int, n: int) -> np.ndarray:
    """Indices of set bits, ascending."""
    return np.nonzero(to_bool_array(bs, n))[0]


def iter_indices(bs: int):
    """Yield set-bit indices ascending without materializing an array."""
    while bs:
        low = bs & -bs
        yield low.bit_length() - 1
        bs ^= low

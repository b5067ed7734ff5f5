"""Compensated summation helpers.

The exponential-length sums in this package (2^N .. 4^N terms) would lose
roughly N bits of precision under naive accumulation, so every long scalar
accumulation goes through a Kahan accumulator.  Works for float and complex.
"""

from __future__ import annotations


class KahanSum:
    """Running compensated sum (Kahan)."""

    __slots__ = ("_s", "_c")

    def __init__(self, value=0.0):
        self._s = value
        self._c = value * 0

    def add(self, value) -> None:
        y = value - self._c
        t = self._s + y
        self._c = (t - self._s) - y
        self._s = t

    @property
    def total(self):
        return self._s


def gray_flips(n: int):
    """Yield (bit, now_set) steps of the reflected Gray code over n bits.

    Visits every nonzero n-bit state exactly once starting from all zeros;
    each step flips a single bit, reported together with its new value.
    """
    state = 0
    for i in range(1, 1 << n):
        gray = i ^ (i >> 1)
        bit = (gray ^ state).bit_length() - 1
        state = gray
        yield bit, (gray >> bit) & 1

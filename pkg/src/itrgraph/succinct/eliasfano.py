"""Elias-Fano representation of monotone integer sequences."""

from __future__ import annotations

import numpy as np

from . import delta
from .bits import BitReader, BitSequence, BitWriter, bits_at


class EliasFanoSeq:
    """Monotone non-decreasing sequence with random access by index.

    Values are split into `low_width` explicit low bits and unary-coded
    high parts; access(i) rebuilds the i-th value exactly.
    """

    __slots__ = ("universe", "_n", "_low_width", "_lows", "_highs")

    def __init__(self, universe: int, n: int, low_width: int, lows: bytes, highs: BitSequence):
        self.universe = universe
        self._n = n
        self._low_width = low_width
        self._lows = lows
        self._highs = highs

    @staticmethod
    def _low_width_for(universe: int, n: int) -> int:
        if n == 0 or universe <= n:
            return 0
        return (universe // n).bit_length() - 1

    @classmethod
    def from_values(cls, values, universe: int) -> "EliasFanoSeq":
        xs = np.asarray(list(values), dtype=np.int64)
        n = len(xs)
        if n:
            if xs[0] < 0 or int(xs[-1]) >= universe or np.any(xs >= universe):
                raise ValueError("value outside universe")
            if np.any(np.diff(xs) < 0):
                raise ValueError("sequence not monotone")
        l = cls._low_width_for(universe, n)
        if n == 0:
            return cls(universe, 0, l, b"", BitSequence.zeros(0))
        if l:
            shifts = np.arange(l - 1, -1, -1, dtype=np.int64)
            low_bits = ((xs[:, None] >> shifts) & 1).astype(np.uint8).ravel()
            lows = np.packbits(low_bits).tobytes()
        else:
            lows = b""
        high_len = n + (universe >> l) + 1
        high_bits = np.zeros(high_len, dtype=np.uint8)
        high_bits[(xs >> l) + np.arange(n, dtype=np.int64)] = 1
        highs = BitSequence(np.packbits(high_bits).tobytes(), high_len)
        return cls(universe, n, l, lows, highs)

    def __len__(self) -> int:
        return self._n

    def access(self, i: int) -> int:
        if not 0 <= i < self._n:
            raise IndexError("sequence index out of range")
        hi = self._highs.select1(i) - i
        if self._low_width:
            lo = bits_at(self._lows, i * self._low_width, self._low_width)
            return (hi << self._low_width) | lo
        return hi

    __getitem__ = access

    def __iter__(self):
        return (self.access(i) for i in range(self._n))

    def range_of_value(self, v: int) -> tuple[int, int]:
        """Index interval [lo, hi) of entries equal to v; empty if absent."""
        return self._lower_bound(v), self._lower_bound(v + 1)

    def _lower_bound(self, v: int) -> int:
        lo, hi = 0, self._n
        while lo < hi:
            mid = (lo + hi) // 2
            if self.access(mid) < v:
                lo = mid + 1
            else:
                hi = mid
        return lo

    def bit_size(self) -> int:
        return self._n * self._low_width + len(self._highs)

    def write_to(self, w: BitWriter) -> None:
        delta.write_value(w, self._n)
        delta.write_value(w, self.universe)
        w.align()
        w.write_bytes(self._lows)
        w.align()
        self._highs.write_to(w)

    @classmethod
    def read_from(cls, r: BitReader) -> "EliasFanoSeq":
        n = delta.read_value(r)
        universe = delta.read_value(r)
        l = cls._low_width_for(universe, n)
        r.align()
        lows = r.read_bytes((n * l + 7) // 8)
        r.align()
        if n == 0:
            return cls(universe, 0, l, b"", BitSequence.zeros(0))
        highs = BitSequence.read_from(r, n + (universe >> l) + 1)
        return cls(universe, n, l, lows, highs)

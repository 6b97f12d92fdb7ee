"""Packed bit buffers: MSB-first bit streams and rank/select bit sequences."""

from __future__ import annotations

import numpy as np

_POPCOUNT8 = np.unpackbits(np.arange(256, dtype=np.uint8)[:, None], axis=1).sum(axis=1)


class TruncatedStreamError(ValueError):
    """A bit stream ended before a complete value could be read."""


class BitWriter:
    """Accumulates bits most-significant-bit first; pads the last byte with zeros."""

    def __init__(self) -> None:
        self._bytes = bytearray()
        self._acc = 0
        self._nbits = 0

    @property
    def bit_length(self) -> int:
        return len(self._bytes) * 8 + self._nbits

    def write_bit(self, bit: int) -> None:
        self.write_bits(bit, 1)

    def write_bits(self, value: int, width: int) -> None:
        """Append the low `width` bits of `value`, highest bit first."""
        if width < 0:
            raise ValueError("negative width")
        self._acc = (self._acc << width) | (value & ((1 << width) - 1))
        self._nbits += width
        while self._nbits >= 8:
            self._nbits -= 8
            self._bytes.append((self._acc >> self._nbits) & 0xFF)
        self._acc &= (1 << self._nbits) - 1

    def write_bytes(self, data: bytes) -> None:
        if not data:
            return
        if self._nbits == 0:
            self._bytes.extend(data)
            return
        # Shift the whole payload once instead of looping per byte.
        n = len(data)
        merged = (self._acc << (8 * n)) | int.from_bytes(data, "big")
        self._bytes.extend((merged >> self._nbits).to_bytes(n, "big"))
        self._acc = merged & ((1 << self._nbits) - 1)

    def align(self) -> None:
        """Pad with zero bits to the next byte boundary."""
        if self._nbits:
            self.write_bits(0, 8 - self._nbits)

    def getvalue(self) -> bytes:
        out = bytearray(self._bytes)
        if self._nbits:
            out.append((self._acc << (8 - self._nbits)) & 0xFF)
        return bytes(out)


class BitReader:
    """Reads bits most-significant-bit first from a byte buffer."""

    def __init__(self, data: bytes, bit_length: int | None = None) -> None:
        self._data = data
        self._limit = len(data) * 8 if bit_length is None else bit_length
        self._pos = 0

    @property
    def position(self) -> int:
        return self._pos

    @property
    def remaining(self) -> int:
        return self._limit - self._pos

    def seek(self, pos: int) -> None:
        if not 0 <= pos <= self._limit:
            raise ValueError("seek out of range")
        self._pos = pos

    def align(self) -> None:
        self._pos = min((self._pos + 7) & ~7, self._limit)

    def read_bit(self) -> int:
        pos = self._pos
        if pos >= self._limit:
            raise TruncatedStreamError("bit stream exhausted")
        self._pos = pos + 1
        return (self._data[pos >> 3] >> (7 - (pos & 7))) & 1

    def read_bits(self, width: int) -> int:
        if width == 0:
            return 0
        pos = self._pos
        end = pos + width
        if end > self._limit:
            raise TruncatedStreamError("bit stream exhausted")
        self._pos = end
        first = pos >> 3
        last = (end - 1) >> 3
        chunk = int.from_bytes(self._data[first : last + 1], "big")
        shift = (last + 1 - first) * 8 - (end - first * 8)
        return (chunk >> shift) & ((1 << width) - 1)

    def read_bytes(self, n: int) -> bytes:
        pos = self._pos
        end = pos + 8 * n
        if end > self._limit:
            raise TruncatedStreamError("bit stream exhausted")
        self._pos = end
        if pos & 7 == 0:
            start = pos >> 3
            return bytes(self._data[start : start + n])
        first = pos >> 3
        last = (end - 1) >> 3
        chunk = int.from_bytes(self._data[first : last + 1], "big")
        shift = (last + 1 - first) * 8 - (end - first * 8)
        return ((chunk >> shift) & ((1 << (8 * n)) - 1)).to_bytes(n, "big")


def bits_at(data, pos: int, width: int) -> int:
    """Read `width` bits at bit offset `pos` from a packed MSB-first buffer."""
    if width == 0:
        return 0
    first = pos >> 3
    end = pos + width
    last = (end - 1) >> 3
    chunk = int.from_bytes(bytes(data[first : last + 1]), "big")
    shift = (last + 1 - first) * 8 - (end - first * 8)
    return (chunk >> shift) & ((1 << width) - 1)


class BitSequence:
    """Immutable packed bit array with O(1) rank and O(log n) select."""

    __slots__ = ("_data", "_length", "_cum")

    def __init__(self, data, bit_length: int) -> None:
        nbytes = (bit_length + 7) // 8
        buf = np.frombuffer(bytes(data), dtype=np.uint8).copy()
        if len(buf) < nbytes:
            raise ValueError("buffer shorter than bit length")
        buf = buf[:nbytes]
        if bit_length & 7:
            # Padding bits must not leak into rank counts.
            buf[-1] &= 0xFF << (8 - (bit_length & 7)) & 0xFF
        self._data = buf
        self._length = bit_length
        cum = np.zeros(nbytes + 1, dtype=np.int64)
        if nbytes:
            np.cumsum(_POPCOUNT8[buf], out=cum[1:])
        self._cum = cum

    @classmethod
    def from_bits(cls, bits) -> "BitSequence":
        bits = list(bits)
        w = BitWriter()
        for b in bits:
            w.write_bit(b)
        return cls(w.getvalue(), len(bits))

    @classmethod
    def zeros(cls, bit_length: int) -> "BitSequence":
        return cls(bytes((bit_length + 7) // 8), bit_length)

    def __len__(self) -> int:
        return self._length

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self._length:
            raise IndexError("bit index out of range")
        return (self._data[i >> 3] >> (7 - (i & 7))) & 1

    @property
    def ones(self) -> int:
        return int(self._cum[-1])

    def rank1(self, i: int) -> int:
        """Number of 1 bits in positions [0, i)."""
        if not 0 <= i <= self._length:
            raise IndexError("rank position out of range")
        full = i >> 3
        r = int(self._cum[full])
        rem = i & 7
        if rem:
            r += int(_POPCOUNT8[self._data[full] >> (8 - rem)])
        return r

    def rank0(self, i: int) -> int:
        return i - self.rank1(i)

    def select1(self, j: int) -> int:
        """Position of the j-th 1 bit, 0-based; rank1(select1(j)) == j."""
        if not 0 <= j < self.ones:
            raise ValueError("select index out of range")
        byte = int(np.searchsorted(self._cum, j, side="right")) - 1
        seen = int(self._cum[byte])
        b = self._data[byte]
        for off in range(8):
            if (b >> (7 - off)) & 1:
                if seen == j:
                    return byte * 8 + off
                seen += 1
        raise AssertionError("select directory inconsistent")

    def write_to(self, w: BitWriter) -> None:
        full = self._length // 8
        w.write_bytes(self._data[:full].tobytes())
        rem = self._length & 7
        if rem:
            w.write_bits(int(self._data[full]) >> (8 - rem), rem)

    @classmethod
    def read_from(cls, r: BitReader, bit_length: int) -> "BitSequence":
        full = bit_length // 8
        data = bytearray(r.read_bytes(full))
        rem = bit_length & 7
        if rem:
            data.append(r.read_bits(rem) << (8 - rem))
        return cls(data, bit_length)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitSequence):
            return NotImplemented
        return self._length == other._length and np.array_equal(self._data, other._data)

    def __hash__(self):
        return hash((self._length, self._data.tobytes()))

"""Elias delta coding of naturals, shifted by one so zero is representable."""

from __future__ import annotations

from dataclasses import dataclass

from .bits import BitReader, BitWriter


def write_value(w: BitWriter, value: int) -> None:
    """Append delta(value + 1) to the stream."""
    if value < 0:
        raise ValueError("delta stream values must be non-negative")
    n = value + 1
    nbits = n.bit_length()
    lbits = nbits.bit_length()
    w.write_bits(0, lbits - 1)
    w.write_bits(nbits, lbits)
    w.write_bits(n, nbits - 1)  # low bits only; the leading 1 is implied


def read_value(r: BitReader) -> int:
    zeros = 0
    while r.read_bit() == 0:
        zeros += 1
    nbits = (1 << zeros) | r.read_bits(zeros)
    return ((1 << (nbits - 1)) | r.read_bits(nbits - 1)) - 1


@dataclass(frozen=True)
class DeltaStream:
    """Concatenated delta codewords with their exact bit length."""

    data: bytes
    bit_length: int
    count: int

    @classmethod
    def encode(cls, values) -> "DeltaStream":
        w = BitWriter()
        n = 0
        for v in values:
            write_value(w, v)
            n += 1
        return cls(w.getvalue(), w.bit_length, n)

    def decode(self) -> list[int]:
        r = BitReader(self.data, self.bit_length)
        out = [read_value(r) for _ in range(self.count)]
        return out

    def reader(self) -> BitReader:
        return BitReader(self.data, self.bit_length)

"""Succinct primitives: bit streams, delta codes, Elias-Fano, k2-trees."""

from .bits import BitReader, BitSequence, BitWriter, TruncatedStreamError, bits_at
from .delta import DeltaStream, read_value, write_value
from .eliasfano import EliasFanoSeq
from .k2tree import K2Tree

__all__ = [
    "BitReader",
    "BitSequence",
    "BitWriter",
    "TruncatedStreamError",
    "bits_at",
    "DeltaStream",
    "read_value",
    "write_value",
    "EliasFanoSeq",
    "K2Tree",
]

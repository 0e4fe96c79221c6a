"""Bit-packed binary codes and popcount-based Hamming distances.

Bit ``i`` of a code lives in word ``i // 64`` at position ``i % 64``
(LSB-first), matching the little-endian byte serialization ``u32 m`` +
``ceil(m/8)`` bytes.  Tail bits past ``m - 1`` are always zero so codes
compare and hash canonically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError, ShapeError

WORD_BITS = 64


def words_needed(m: int) -> int:
    return (m + WORD_BITS - 1) // WORD_BITS


def pack_sign_bits(values: np.ndarray) -> np.ndarray:
    """Pack sign bits (1 iff value >= 0) of ``(..., m)`` reals into uint64 words.

    Returns a ``(..., ceil(m/64))`` uint64 array with zeroed tail bits.
    """
    values = np.asarray(values)
    if values.shape[-1] == 0:
        raise ShapeError("cannot pack an empty vector")
    bits = (values >= 0.0).astype(np.uint8)
    return pack_bits(bits)


def pack_bits(bits: np.ndarray) -> np.ndarray:
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    byts = np.packbits(bits, axis=-1, bitorder="little")
    pad = words_needed(bits.shape[-1]) * 8 - byts.shape[-1]
    if pad:
        width = [(0, 0)] * (byts.ndim - 1) + [(0, pad)]
        byts = np.pad(byts, width)
    return np.ascontiguousarray(byts).view("<u8")


def unpack_bits(words: np.ndarray, m: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`: uint8 0/1 array of length ``m``."""
    byts = np.ascontiguousarray(words).view(np.uint8)
    return np.unpackbits(byts, axis=-1, count=m, bitorder="little")


def popcount(words: np.ndarray) -> np.ndarray:
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class BinaryCode:
    """An ``m``-bit embedding output; bit k = 1 iff projection coordinate k >= 0."""

    m: int
    words: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.m < 1:
            raise ShapeError("code must have at least one bit")
        w = np.ascontiguousarray(self.words, dtype=np.uint64)
        if w.shape != (words_needed(self.m),):
            raise ShapeError(
                f"expected {words_needed(self.m)} words for {self.m} bits, got {w.shape}"
            )
        if _tail_garbage(w, self.m):
            raise FormatError("bits beyond the code length must be zero")
        w.flags.writeable = False
        object.__setattr__(self, "words", w)

    @classmethod
    def from_values(cls, values) -> "BinaryCode":
        """sign-quantize a real vector; sign(0) is +1 by convention."""
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 1:
            raise ShapeError("from_values expects a 1-D vector")
        return cls._trusted(values.shape[0], pack_sign_bits(values))

    @classmethod
    def _trusted(cls, m: int, words: np.ndarray) -> "BinaryCode":
        # packer output is canonical by construction; skip re-validation
        code = object.__new__(cls)
        words.flags.writeable = False
        object.__setattr__(code, "m", m)
        object.__setattr__(code, "words", words)
        return code

    @classmethod
    def from_bits(cls, bits) -> "BinaryCode":
        bits = np.asarray(bits)
        return cls(bits.shape[-1], pack_bits(bits))

    def bits(self) -> np.ndarray:
        return unpack_bits(self.words, self.m)

    def popcount(self) -> int:
        return int(popcount(self.words))

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryCode):
            return NotImplemented
        return self.m == other.m and bool(np.array_equal(self.words, other.words))

    def __invert__(self) -> "BinaryCode":
        return BinaryCode.from_bits(1 - self.bits())

    def to_bytes(self) -> bytes:
        nbytes = (self.m + 7) // 8
        return self.m.to_bytes(4, "little") + self.words.tobytes()[:nbytes]

    @classmethod
    def from_bytes(cls, buf: bytes) -> "BinaryCode":
        code, rest = cls.read_from(buf)
        if rest:
            raise FormatError(f"{len(rest)} trailing bytes after code record")
        return code

    @classmethod
    def read_from(cls, buf: bytes) -> tuple["BinaryCode", bytes]:
        """Parse one ``u32 m`` + packed-byte record; return (code, remainder)."""
        if len(buf) < 4:
            raise FormatError("truncated code record (missing length)")
        m = int.from_bytes(buf[:4], "little")
        if m < 1:
            raise FormatError(f"invalid code length {m}")
        nbytes = (m + 7) // 8
        if len(buf) < 4 + nbytes:
            raise FormatError("truncated code record (missing payload)")
        payload = np.frombuffer(buf[4 : 4 + nbytes], dtype=np.uint8)
        pad = words_needed(m) * 8 - nbytes
        words = np.ascontiguousarray(np.pad(payload, (0, pad))).view("<u8")
        return cls(m, words), buf[4 + nbytes :]


def _tail_garbage(words: np.ndarray, m: int) -> bool:
    used = m % WORD_BITS
    if used == 0:
        return False
    mask = np.uint64((1 << used) - 1)
    return bool(words[-1] & ~mask)


def hamming_distance(a: BinaryCode, b: BinaryCode) -> int:
    """Number of differing bits between two equal-length codes."""
    if a.m != b.m:
        raise ShapeError(f"code lengths differ: {a.m} vs {b.m}")
    return int(popcount(a.words ^ b.words))


def hamming_matrix(query_words: np.ndarray, corpus_words: np.ndarray, chunk: int = 64) -> np.ndarray:
    """Pairwise bit distances between two packed word matrices.

    Chunks the query axis so the XOR workspace stays small.
    """
    q = np.ascontiguousarray(query_words, dtype=np.uint64)
    c = np.ascontiguousarray(corpus_words, dtype=np.uint64)
    if q.ndim != 2 or c.ndim != 2 or q.shape[1] != c.shape[1]:
        raise ShapeError("packed word matrices must be 2-D with equal word counts")
    out = np.empty((q.shape[0], c.shape[0]), dtype=np.int64)
    for lo in range(0, q.shape[0], chunk):
        hi = min(lo + chunk, q.shape[0])
        out[lo:hi] = popcount(q[lo:hi, None, :] ^ c[None, :, :])
    return out

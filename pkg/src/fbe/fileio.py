"""Binary file formats for projectors, codes, and vector batches.

All integers are little-endian.

Projector files: magic ``FBE1``, one kind byte (0=LSH, 1=CBE, 2=BP,
3=proposed), then a kind-specific payload.  The proposed-method payload is
``u32 n, u32 m, u64 seed, m float64 seed-row entries, ceil(n/8) sign bits``
(bit i set means +1, LSB-first); the permutation is regenerated from the
seed on load, which is what keeps the stored size at O(n) bits.

Code records: ``u32 m`` + ``ceil(m/8)`` packed bytes, LSB-first within each
byte; a code file is a plain concatenation of records.

Vector batches: dense ``FBV1`` = magic, u32 count, u32 n, count*n float64
row-major; sparse ``FBS1`` = magic, u32 count, u32 n, then per row
``u32 nnz`` followed by nnz (u32 index, float64 value) pairs.
"""

from __future__ import annotations

import struct
from typing import BinaryIO

import numpy as np

from .baselines import (
    KIND_BP,
    KIND_CBE,
    KIND_LSH,
    KIND_PROPOSED,
    BpProjector,
    CbeProjector,
    LshProjector,
)
from .bincode import BinaryCode
from .errors import FormatError
from .projection import CirculantProjector, Embedder, Randomizer

PROJECTOR_MAGIC = b"FBE1"
DENSE_MAGIC = b"FBV1"
SPARSE_MAGIC = b"FBS1"


def _read_exact(stream: BinaryIO, size: int, what: str) -> bytes:
    buf = stream.read(size)
    if len(buf) != size:
        raise FormatError(f"truncated file while reading {what}")
    return buf


def _read_struct(stream: BinaryIO, fmt: str, what: str) -> tuple:
    return struct.unpack(fmt, _read_exact(stream, struct.calcsize(fmt), what))


def _pack_pm1(values: np.ndarray) -> bytes:
    bits = (np.asarray(values) > 0).astype(np.uint8)
    return np.packbits(bits, bitorder="little").tobytes()


def _unpack_pm1(buf: bytes, n: int) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(buf, dtype=np.uint8), count=n, bitorder="little")
    return bits * 2.0 - 1.0


def write_projector(path, projector) -> None:
    with open(path, "wb") as fh:
        _write_projector(fh, projector)


def _write_projector(fh: BinaryIO, projector) -> None:
    fh.write(PROJECTOR_MAGIC)
    if isinstance(projector, Embedder):
        fh.write(bytes([KIND_PROPOSED]))
        fh.write(struct.pack("<IIQ", projector.n, projector.m, projector.seed))
        fh.write(projector.circulant.seed_vector.astype("<f8").tobytes())
        fh.write(_pack_pm1(projector.randomizer.signs[: projector.n]))
    elif isinstance(projector, LshProjector):
        fh.write(bytes([KIND_LSH]))
        fh.write(struct.pack("<IIQ", projector.n, projector.m, projector.seed))
    elif isinstance(projector, CbeProjector):
        fh.write(bytes([KIND_CBE]))
        fh.write(struct.pack("<IIQB", projector.n, projector.m, projector.seed,
                             1 if projector.uses_sign_flips else 0))
        fh.write(projector.seed_vector.astype("<f8").tobytes())
        fh.write(_pack_pm1(projector.sign_flips))
    elif isinstance(projector, BpProjector):
        fh.write(bytes([KIND_BP]))
        fh.write(struct.pack("<IIIIIIQ", projector.n, projector.m,
                             projector.n1, projector.n2, projector.m1, projector.m2,
                             projector.seed))
    else:
        raise TypeError(f"cannot serialize {type(projector).__name__}")


def read_projector(path):
    with open(path, "rb") as fh:
        return _read_projector(fh)


def _read_projector(fh: BinaryIO):
    magic = _read_exact(fh, 4, "magic")
    if magic != PROJECTOR_MAGIC:
        raise FormatError(f"bad projector magic {magic!r}")
    kind = _read_exact(fh, 1, "kind tag")[0]
    if kind == KIND_PROPOSED:
        n, m, seed = _read_struct(fh, "<IIQ", "header")
        seed_vector = np.frombuffer(_read_exact(fh, 8 * m, "seed row"), dtype="<f8")
        head_signs = _unpack_pm1(_read_exact(fh, (n + 7) // 8, "sign bits"), n)
        n_padded = m * -(-n // m)
        # only the first n signs act on real coordinates; the padded tail
        # multiplies zeros, so regenerating it from the seed is harmless
        signs = np.concatenate([head_signs, np.ones(n_padded - n)]) if n_padded > n else head_signs
        permutation = Randomizer(n_padded, seed).permutation
        randomizer = Randomizer(n_padded, seed, permutation=permutation, signs=signs)
        return Embedder(n, m, seed, randomizer=randomizer,
                        circulant=CirculantProjector(seed_vector, seed))
    if kind == KIND_LSH:
        n, m, seed = _read_struct(fh, "<IIQ", "header")
        return LshProjector(n, m, seed)
    if kind == KIND_CBE:
        n, m, seed, flips_flag = _read_struct(fh, "<IIQB", "header")
        seed_vector = np.frombuffer(_read_exact(fh, 8 * n, "seed row"), dtype="<f8")
        flips = _unpack_pm1(_read_exact(fh, (n + 7) // 8, "flip bits"), n)
        return CbeProjector(n, m, seed, sign_flips=bool(flips_flag),
                            seed_vector=seed_vector, flips=flips)
    if kind == KIND_BP:
        n, m, n1, n2, m1, m2, seed = _read_struct(fh, "<IIIIIIQ", "header")
        proj = BpProjector(n, m, seed, n1=n1, m1=m1)
        if (proj.n2, proj.m2) != (n2, m2):
            raise FormatError("inconsistent bilinear factorization in header")
        return proj
    raise FormatError(f"unknown projector kind tag {kind}")


def write_codes(path, codes) -> None:
    """Write an iterable of codes, or a (words_matrix, m) pair, as
    concatenated ``u32 m`` + payload records."""
    with open(path, "wb") as fh:
        if isinstance(codes, tuple):
            words, m = codes
            nbytes = (m + 7) // 8
            header = int(m).to_bytes(4, "little")
            for row in np.ascontiguousarray(words, dtype=np.uint64):
                fh.write(header)
                fh.write(row.tobytes()[:nbytes])
        else:
            for code in codes:
                fh.write(code.to_bytes())


def read_codes(path) -> list[BinaryCode]:
    with open(path, "rb") as fh:
        buf = fh.read()
    codes = []
    while buf:
        code, buf = BinaryCode.read_from(buf)
        codes.append(code)
    return codes


def codes_to_words(codes: list[BinaryCode]) -> tuple[np.ndarray, int]:
    if not codes:
        raise FormatError("empty code file")
    m = codes[0].m
    if any(c.m != m for c in codes):
        raise FormatError("codes in one file must share a bit length")
    return np.stack([c.words for c in codes]), m


def write_vectors_dense(path, batch) -> None:
    batch = np.ascontiguousarray(batch, dtype=np.float64)
    if batch.ndim != 2:
        raise FormatError("dense batch must be a 2-D array")
    with open(path, "wb") as fh:
        fh.write(DENSE_MAGIC)
        fh.write(struct.pack("<II", batch.shape[0], batch.shape[1]))
        fh.write(batch.astype("<f8").tobytes())


def write_vectors_sparse(path, batch) -> None:
    batch = np.ascontiguousarray(batch, dtype=np.float64)
    if batch.ndim != 2:
        raise FormatError("sparse batch must be a 2-D array")
    with open(path, "wb") as fh:
        fh.write(SPARSE_MAGIC)
        fh.write(struct.pack("<II", batch.shape[0], batch.shape[1]))
        for row in batch:
            idx = np.flatnonzero(row)
            fh.write(struct.pack("<I", idx.size))
            for i in idx:
                fh.write(struct.pack("<Id", int(i), float(row[i])))


def read_vectors(path) -> np.ndarray:
    """Read either batch format back into a dense (count, n) array."""
    with open(path, "rb") as fh:
        magic = _read_exact(fh, 4, "magic")
        if magic == DENSE_MAGIC:
            count, n = _read_struct(fh, "<II", "header")
            data = np.frombuffer(_read_exact(fh, 8 * count * n, "payload"), dtype="<f8")
            _expect_eof(fh)
            return data.reshape(count, n).copy()
        if magic == SPARSE_MAGIC:
            count, n = _read_struct(fh, "<II", "header")
            out = np.zeros((count, n))
            for r in range(count):
                (nnz,) = _read_struct(fh, "<I", f"row {r} nnz")
                if nnz > n:
                    raise FormatError(f"row {r} claims {nnz} nonzeros in dimension {n}")
                for _ in range(nnz):
                    i, v = _read_struct(fh, "<Id", f"row {r} entry")
                    if i >= n:
                        raise FormatError(f"row {r} index {i} out of range")
                    out[r, i] = v
            _expect_eof(fh)
            return out
        raise FormatError(f"bad vector batch magic {magic!r}")


def _expect_eof(fh: BinaryIO) -> None:
    if fh.read(1):
        raise FormatError("trailing bytes after payload")

"""The ``RBE1`` byte container for encoded images.

All integers are little-endian.  Layout::

    magic "RBE1" | u8 version | u8 mode | u8 bank | u8 flags
    u16 width | u16 height | u8 levels | u32 region_count
    label map RLE:  u32 runs, runs x (u32 length, u32 label)      row-major
    [flags bit0]    support mask RLE, same run layout, values 0/1
    [grad mode]     region_count x (f64 gx, f64 gy)
    [epwt mode]     per level, coarsest first: u32 n, n x u32
    u32 n_approx, n_approx x f64
    per level, coarsest first: u32 n_detail, n_detail x f64
    u32 CRC32 of every preceding byte

Flags bit1 marks paths built with the Chebyshev distance (Euclidean otherwise).
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .codec import EASY, EPWT, GRAD, EncodedImage
from .errors import FormatError
from .paths import CHEBYSHEV, EUCLIDEAN
from .segmentation import LabelMap

__all__ = ["MAGIC", "VERSION", "serialize", "deserialize", "read_encoded", "write_encoded", "rle_encode", "rle_decode"]

MAGIC = b"RBE1"
VERSION = 1

_MODE_CODES = {EASY: 0, GRAD: 1, EPWT: 2}
_BANK_CODES = {"haar": 0, "cdf97": 1}
_FLAG_MASK = 0x01
_FLAG_CHEBYSHEV = 0x02
_HEADER = struct.Struct("<4sBBBBHHBI")


def rle_encode(values) -> np.ndarray:
    """Run-length encode a 1-D integer sequence as ``(length, value)`` rows."""
    values = np.asarray(values).ravel()
    if len(values) == 0:
        return np.empty((0, 2), dtype=np.uint32)
    starts = np.r_[0, np.flatnonzero(np.diff(values)) + 1]
    lengths = np.diff(np.r_[starts, len(values)])
    return np.column_stack([lengths, values[starts]]).astype(np.uint32)


def rle_decode(runs, total: int) -> np.ndarray:
    runs = np.asarray(runs, dtype=np.int64).reshape(-1, 2)
    if runs[:, 0].sum() != total or (runs[:, 0] == 0).any():
        raise FormatError(f"corrupt stream: run lengths do not cover {total} pixels")
    return np.repeat(runs[:, 1], runs[:, 0])


def serialize(enc: EncodedImage) -> bytes:
    flags = 0
    if enc.mask is not None:
        flags |= _FLAG_MASK
    if enc.distance == CHEBYSHEV:
        flags |= _FLAG_CHEBYSHEV
    parts = [
        _HEADER.pack(MAGIC, VERSION, _MODE_CODES[enc.mode], _BANK_CODES[enc.bank], flags,
                     enc.width, enc.height, enc.levels, enc.labelmap.region_count)
    ]

    def runs(values):
        table = rle_encode(values)
        parts.append(struct.pack("<I", len(table)))
        parts.append(table.astype("<u4").tobytes())

    def vector(values, dtype):
        values = np.asarray(values)
        parts.append(struct.pack("<I", len(values)))
        parts.append(values.astype(dtype).tobytes())

    runs(enc.labelmap.labels)
    if enc.mask is not None:
        runs(np.asarray(enc.mask, dtype=np.uint32))
    if enc.mode == GRAD:
        parts.append(np.asarray(enc.gradients, dtype="<f8").reshape(-1, 2).tobytes())
    if enc.mode == EPWT:
        for perm in enc.perms:
            vector(perm, "<u4")
    vector(enc.approx, "<f8")
    for detail in enc.details:
        vector(detail, "<f8")
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, size: int) -> bytes:
        end = self.pos + size
        if end > len(self.data):
            raise FormatError(f"truncation: stream ends at byte {len(self.data)}, needed {end}")
        chunk = self.data[self.pos:end]
        self.pos = end
        return chunk

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def array(self, count: int, dtype: str) -> np.ndarray:
        itemsize = np.dtype(dtype).itemsize
        return np.frombuffer(self.take(count * itemsize), dtype=dtype).astype(dtype[1:])

    def vector(self, dtype: str) -> np.ndarray:
        return self.array(self.u32(), dtype)


def deserialize(data: bytes) -> EncodedImage:
    data = bytes(data)
    if data[:4] != MAGIC:
        raise FormatError(f"bad magic: expected {MAGIC!r}, got {data[:4]!r}")
    reader = _Reader(data)
    magic, version, mode_code, bank_code, flags, width, height, levels, region_count = _HEADER.unpack(
        reader.take(_HEADER.size)
    )
    if version != VERSION:
        raise FormatError(f"version mismatch: stream version {version}, supported {VERSION}")
    modes = {v: k for k, v in _MODE_CODES.items()}
    banks = {v: k for k, v in _BANK_CODES.items()}
    if mode_code not in modes or bank_code not in banks:
        raise FormatError(f"corrupt stream: unknown mode {mode_code} or bank {bank_code}")
    mode, bank = modes[mode_code], banks[bank_code]

    total = width * height
    labels = rle_decode(reader.array(reader.u32() * 2, "<u4"), total).reshape(height, width)
    mask = None
    if flags & _FLAG_MASK:
        mask = rle_decode(reader.array(reader.u32() * 2, "<u4"), total).reshape(height, width).astype(bool)
    gradients = reader.array(region_count * 2, "<f8").reshape(-1, 2) if mode == GRAD else None
    perms = [reader.vector("<u4").astype(np.int64) for _ in range(levels)] if mode == EPWT else None
    approx = reader.vector("<f8")
    details = [reader.vector("<f8") for _ in range(levels)]
    (crc,) = struct.unpack("<I", reader.take(4))
    if reader.pos != len(data):
        raise FormatError(f"corrupt stream: {len(data) - reader.pos} trailing bytes")
    if zlib.crc32(data[:-4]) != crc:
        raise FormatError("checksum failure: CRC32 mismatch")

    try:
        labelmap = LabelMap(labels)
    except ValueError as exc:
        raise FormatError(f"corrupt stream: {exc}") from None
    if labelmap.region_count != region_count:
        raise FormatError("corrupt stream: region count does not match the label map")
    if perms is not None:
        for perm in perms:
            if not np.array_equal(np.sort(perm), np.arange(len(perm))):
                raise FormatError("corrupt stream: stored path is not a permutation")
    return EncodedImage(
        mode=mode, bank=bank, levels=levels, width=width, height=height, labelmap=labelmap,
        approx=approx, details=details, gradients=gradients, perms=perms, mask=mask,
        distance=CHEBYSHEV if flags & _FLAG_CHEBYSHEV else EUCLIDEAN,
    )


def write_encoded(enc: EncodedImage, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize(enc))


def read_encoded(path) -> EncodedImage:
    with open(path, "rb") as fh:
        return deserialize(fh.read())

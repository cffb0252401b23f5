"""Pixel grids, canonical ordering and PGM file I/O.

Images are plain ``numpy`` arrays of shape ``(height, width)`` and dtype
``float64``.  Coordinates are ``(row, col)`` pairs and the canonical order of
a grid is row-major.
"""

from __future__ import annotations

import os
import re

import numpy as np

from .errors import FormatError

__all__ = [
    "as_gray_image",
    "load_image",
    "save_image",
    "row_major_rank",
    "to_bytes",
    "sort_row_major",
]

_MAXVAL = 255
_TOKEN = re.compile(rb"#[^\n\r]*|\S+")


def as_gray_image(pixels) -> np.ndarray:
    """Return *pixels* as a C-contiguous 2-D float64 array (copying if needed)."""
    img = np.ascontiguousarray(pixels, dtype=np.float64)
    if img.ndim != 2 or img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D gray image, got shape {img.shape}")
    return img


def row_major_rank(coord, width: int) -> int:
    row, col = coord
    if not 0 <= col < width:
        raise ValueError(f"column {col} outside width {width}")
    return row * width + col


def sort_row_major(coords: np.ndarray) -> np.ndarray:
    """Return an ``(n, 2)`` coordinate array sorted in row-major order."""
    coords = np.asarray(coords, dtype=np.int64).reshape(-1, 2)
    order = np.lexsort((coords[:, 1], coords[:, 0]))
    return coords[order]


def _header_tokens(data: bytes, count: int):
    """Read *count* header tokens, skipping comments.

    Returns the tokens and the offset just past the last one.
    """
    tokens = []
    pos = 0
    for match in _TOKEN.finditer(data):
        if match.group().startswith(b"#"):
            continue
        tokens.append(match.group())
        pos = match.end()
        if len(tokens) == count:
            break
    if len(tokens) < count:
        raise FormatError("malformed header: file ends inside the PGM header")
    return tokens, pos


def load_image(path) -> np.ndarray:
    """Read a P2 or P5 PGM with maxval 255 into a float64 array."""
    with open(path, "rb") as fh:
        data = fh.read()
    tokens, pos = _header_tokens(data, 4)
    magic = tokens[0]
    if magic not in (b"P2", b"P5"):
        raise FormatError(f"malformed header: unsupported magic {magic!r}")
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError:
        raise FormatError("malformed header: non-integer size or maxval") from None
    if width < 1 or height < 1:
        raise FormatError(f"malformed header: bad size {width}x{height}")
    if maxval != _MAXVAL:
        raise FormatError(f"maxval must be 255, got {maxval}")
    n = width * height

    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        payload = data[pos + 1 : pos + 1 + n]
        if len(payload) < n:
            raise FormatError(f"truncated payload: expected {n} bytes, got {len(payload)}")
        values = np.frombuffer(payload, dtype=np.uint8)
    else:
        body = [t for t in _TOKEN.findall(data[pos:]) if not t.startswith(b"#")]
        if len(body) < n:
            raise FormatError(f"truncated payload: expected {n} values, got {len(body)}")
        try:
            values = np.array([int(t) for t in body[:n]], dtype=np.int64)
        except ValueError:
            raise FormatError("malformed payload: non-integer gray value") from None
        if values.min() < 0 or values.max() > _MAXVAL:
            raise FormatError("malformed payload: gray value outside [0, 255]")
    return values.astype(np.float64).reshape(height, width)


def to_bytes(img) -> np.ndarray:
    """Quantize to uint8: round half-up, then clamp to [0, 255]."""
    img = np.asarray(img, dtype=np.float64)
    return np.clip(np.floor(img + 0.5), 0, _MAXVAL).astype(np.uint8)


def save_image(img, path) -> None:
    """Write *img* as a binary (P5) PGM."""
    raster = to_bytes(as_gray_image(img))
    height, width = raster.shape
    header = f"P5\n{width} {height}\n{_MAXVAL}\n".encode("ascii")
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(raster.tobytes())
    os.replace(tmp, path)

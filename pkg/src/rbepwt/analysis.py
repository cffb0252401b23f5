"""N-term thresholding, PSNR and basis-element extraction."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .codec import EncodedImage, decode
from .imagecore import as_gray_image
from .wavelet import tensor_dwt2, tensor_idwt2

__all__ = [
    "CoeffId",
    "coeff_offsets",
    "flat_index",
    "largest_indices",
    "keep_n_largest",
    "psnr_paper",
    "psnr_std",
    "basis_element",
    "tensor_n_term",
    "metrics_row",
    "METRICS_HEADER",
]


class CoeffId(NamedTuple):
    """Address of one coefficient.

    ``level == 0`` is the lowest approximation vector, ``level == l >= 1``
    the detail vector of level ``l``.  Tuple order is the canonical
    tie-break order.
    """

    level: int
    index: int


def coeff_offsets(enc: EncodedImage) -> np.ndarray:
    """Start of each vector (approx, details coarse to fine) in the flat coefficient order."""
    return np.cumsum([0, len(enc.approx)] + [len(d) for d in enc.details])


def flat_index(enc: EncodedImage, cid) -> int:
    level, index = cid
    if not 0 <= level <= enc.levels:
        raise ValueError(f"level {level} outside 0..{enc.levels}")
    offsets = coeff_offsets(enc)
    size = offsets[level + 1] - offsets[level]
    if not 0 <= index < size:
        raise ValueError(f"index {index} outside vector of length {size} at level {level}")
    return int(offsets[level] + index)


def largest_indices(values, n: int) -> np.ndarray:
    """Indices of the *n* largest magnitudes; equal magnitudes keep the lower index."""
    values = np.asarray(values)
    order = np.argsort(-np.abs(values), kind="stable")
    return order[:n]


def keep_n_largest(enc: EncodedImage, n: int) -> EncodedImage:
    """Zero every coefficient except the *n* largest in absolute value."""
    coeffs = enc.coefficients()
    if not 0 <= n <= len(coeffs):
        raise ValueError(f"cannot keep {n} of {len(coeffs)} coefficients")
    out = np.zeros_like(coeffs)
    keep = largest_indices(coeffs, n)
    out[keep] = coeffs[keep]
    return enc.with_coefficients(out)


def _check_pair(f, g):
    f, g = as_gray_image(f), as_gray_image(g)
    if f.shape != g.shape:
        raise ValueError(f"image shapes differ: {f.shape} vs {g.shape}")
    return f, g


def psnr_paper(f, g) -> float:
    """``20 log2(255 / ||f - g||_2)`` with the un-normalised norm; ``inf`` when equal."""
    f, g = _check_pair(f, g)
    norm = float(np.linalg.norm(f - g))
    if norm == 0.0:
        return math.inf
    return 20.0 * math.log2(255.0 / norm)


def psnr_std(f, g) -> float:
    """Conventional PSNR in dB, ``10 log10(255^2 / MSE)``."""
    f, g = _check_pair(f, g)
    mse = float(np.mean((f - g) ** 2))
    if mse == 0.0:
        raise ValueError("PSNR is infinite for identical images")
    return 10.0 * math.log10(255.0**2 / mse)


def basis_element(enc: EncodedImage, cid) -> np.ndarray:
    """Decode a unit coefficient vector (real-valued, not clamped)."""
    unit = np.zeros(enc.coefficient_count)
    unit[flat_index(enc, cid)] = 1.0
    return decode(enc.with_coefficients(unit))


def tensor_n_term(img, bank, n: int, levels: int | None = None) -> np.ndarray:
    """Approximate *img* with the *n* largest 2-D tensor wavelet coefficients."""
    img = as_gray_image(img)
    if levels is None:
        levels = img.shape[0].bit_length() - 1
    coeffs = tensor_dwt2(img, bank, levels)
    flat = coeffs.ravel()
    kept = np.zeros_like(flat)
    idx = largest_indices(flat, n)
    kept[idx] = flat[idx]
    return tensor_idwt2(kept.reshape(coeffs.shape), bank, levels)


METRICS_HEADER = "image,mode,bank,n_coeffs,psnr_paper,psnr_std"


def metrics_row(image: str, mode: str, bank: str, n_coeffs, f, g) -> str:
    printed = psnr_paper(f, g)
    try:
        std = psnr_std(f, g)
    except ValueError:
        std = math.inf
    return f"{image},{mode},{bank},{n_coeffs},{printed:.6f},{std:.6f}"

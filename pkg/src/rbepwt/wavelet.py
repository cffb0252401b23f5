"""Periodic two-channel filter banks and the 2-D tensor baseline.

Single-level analysis of a periodic signal ``x`` of even length ``n``::

    approx[k] = sum_m low[m]  * x[(2k + low_offset  + m) mod n]
    detail[k] = sum_m high[m] * x[(2k + high_offset + m) mod n]

Synthesis scatters each coefficient back through the synthesis taps with the
same indexing.  For odd ``n`` the last sample is held out: it bypasses the
filters and is appended to ``approx`` unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .imagecore import as_gray_image

__all__ = [
    "FilterBank",
    "CoeffPair",
    "HAAR",
    "CDF97",
    "BANKS",
    "get_bank",
    "dwt_periodic",
    "idwt_periodic",
    "check_perfect_reconstruction",
    "tensor_dwt2",
    "tensor_idwt2",
]


@dataclass(frozen=True)
class FilterBank:
    name: str
    analysis_low: tuple
    analysis_high: tuple
    synthesis_low: tuple
    synthesis_high: tuple
    # index of the first tap relative to 2k
    low_offset: int = 0
    high_offset: int = 0
    synthesis_low_offset: int = 0
    synthesis_high_offset: int = 0


class CoeffPair(NamedTuple):
    approx: np.ndarray
    detail: np.ndarray


_S = 1.0 / np.sqrt(2.0)

HAAR = FilterBank(
    name="haar",
    analysis_low=(_S, _S),
    analysis_high=(_S, -_S),
    synthesis_low=(_S, _S),
    synthesis_high=(_S, -_S),
)

# CDF 9/7 taps scaled so the analysis low-pass has DC gain sqrt(2)
_CDF_LOW = np.sqrt(2.0) * np.array([
    0.026748757410810, -0.016864118442875, -0.078223266528990,
    0.266864118442875, 0.602949018236360, 0.266864118442875,
    -0.078223266528990, -0.016864118442875, 0.026748757410810,
])
_CDF_SYN_LOW = np.array([
    -0.091271763114250, -0.057543526228500, 0.591271763114250,
    1.115087052457000, 0.591271763114250, -0.057543526228500,
    -0.091271763114250,
]) / np.sqrt(2.0)
# quadrature mirror relations; both high-pass filters are centred on 2k + 1
_CDF_HIGH = np.array([(-1.0) ** (m + 1) * _CDF_SYN_LOW[m + 3] for m in range(-3, 4)])
_CDF_SYN_HIGH = np.array([(-1.0) ** (m + 1) * _CDF_LOW[m + 4] for m in range(-4, 5)])

CDF97 = FilterBank(
    name="cdf97",
    analysis_low=tuple(_CDF_LOW),
    analysis_high=tuple(_CDF_HIGH),
    synthesis_low=tuple(_CDF_SYN_LOW),
    synthesis_high=tuple(_CDF_SYN_HIGH),
    low_offset=-4,
    high_offset=-2,
    synthesis_low_offset=-3,
    synthesis_high_offset=-3,
)

BANKS = {"haar": HAAR, "cdf97": CDF97}


def get_bank(bank) -> FilterBank:
    if isinstance(bank, FilterBank):
        return bank
    try:
        return BANKS[bank]
    except KeyError:
        raise ValueError(f"unknown filter bank {bank!r}; expected one of {sorted(BANKS)}") from None


def _analyse(x: np.ndarray, taps, offset: int) -> np.ndarray:
    """Filter and downsample along the last axis."""
    n = x.shape[-1]
    base = 2 * np.arange(n // 2) + offset
    out = np.zeros(x.shape[:-1] + (n // 2,))
    for m, tap in enumerate(taps):
        out += tap * x[..., (base + m) % n]
    return out


def _synthesise(out: np.ndarray, coeffs: np.ndarray, taps, offset: int) -> None:
    """Upsample and filter *coeffs* along the last axis, accumulating into *out*."""
    n = out.shape[-1]
    base = 2 * np.arange(coeffs.shape[-1]) + offset
    for m, tap in enumerate(taps):
        # 2k + c is distinct mod n for k < n / 2, so the buffered add is safe
        out[..., (base + m) % n] += tap * coeffs


def dwt_periodic(signal, bank) -> CoeffPair:
    """One analysis level; odd-length signals keep their last sample in ``approx``."""
    fb = get_bank(bank)
    x = np.asarray(signal, dtype=np.float64).ravel()
    n = len(x)
    if n < 2:
        raise ValueError(f"signal must have at least 2 samples, got {n}")
    even = x[: n - n % 2]
    approx = _analyse(even, fb.analysis_low, fb.low_offset)
    detail = _analyse(even, fb.analysis_high, fb.high_offset)
    if n % 2:
        approx = np.append(approx, x[-1])
    return CoeffPair(approx, detail)


def idwt_periodic(approx, detail, bank, n: int) -> np.ndarray:
    """Inverse of :func:`dwt_periodic` for an original length *n*."""
    fb = get_bank(bank)
    approx = np.asarray(approx, dtype=np.float64).ravel()
    detail = np.asarray(detail, dtype=np.float64).ravel()
    if n < 2 or len(approx) != (n + 1) // 2 or len(detail) != n // 2:
        raise ValueError(
            f"inconsistent lengths: approx {len(approx)}, detail {len(detail)} for n={n}"
        )
    even = n - n % 2
    out = np.zeros(even)
    _synthesise(out, approx[: even // 2], fb.synthesis_low, fb.synthesis_low_offset)
    _synthesise(out, detail, fb.synthesis_high, fb.synthesis_high_offset)
    if n % 2:
        out = np.append(out, approx[-1])
    return out


def check_perfect_reconstruction(bank, trials: int = 200, tol: float = 1e-10, seed: int = 0) -> float:
    """Round-trip random periodic signals; raise if any error exceeds *tol*.

    Guards against transcription errors in the filter taps.
    """
    fb = get_bank(bank)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        n = 2 * int(rng.integers(1, 33))
        x = rng.standard_normal(n)
        a, d = dwt_periodic(x, fb)
        worst = max(worst, float(np.abs(idwt_periodic(a, d, fb, n) - x).max()))
    if worst > tol:
        raise RuntimeError(f"filter bank {fb.name} fails perfect reconstruction: error {worst:.3g}")
    return worst


for _fb in BANKS.values():
    check_perfect_reconstruction(_fb)


def _check_square_pow2(shape, levels: int) -> int:
    height, width = shape
    if height != width or width & (width - 1):
        raise ValueError(f"tensor transform needs a square power-of-two image, got {width}x{height}")
    depth = width.bit_length() - 1
    if not 1 <= levels <= depth:
        raise ValueError(f"levels must be in 1..{depth} for a {width}x{width} image")
    return depth


def _dwt_axis(block: np.ndarray, fb: FilterBank, axis: int) -> np.ndarray:
    moved = np.moveaxis(block, axis, -1)
    out = np.concatenate(
        [_analyse(moved, fb.analysis_low, fb.low_offset), _analyse(moved, fb.analysis_high, fb.high_offset)],
        axis=-1,
    )
    return np.moveaxis(out, -1, axis)


def _idwt_axis(block: np.ndarray, fb: FilterBank, axis: int) -> np.ndarray:
    moved = np.moveaxis(block, axis, -1)
    half = moved.shape[-1] // 2
    out = np.zeros(moved.shape)
    _synthesise(out, moved[..., :half], fb.synthesis_low, fb.synthesis_low_offset)
    _synthesise(out, moved[..., half:], fb.synthesis_high, fb.synthesis_high_offset)
    return np.moveaxis(out, -1, axis)


def tensor_dwt2(img, bank, levels: int) -> np.ndarray:
    """Separable periodic 2-D transform in the usual Mallat layout.

    The approximation band of the last level sits in the top-left corner;
    each level's detail bands surround it.
    """
    fb = get_bank(bank)
    coeffs = as_gray_image(img).copy()
    _check_square_pow2(coeffs.shape, levels)
    size = coeffs.shape[0]
    for _ in range(levels):
        block = coeffs[:size, :size]
        block = _dwt_axis(block, fb, axis=1)
        coeffs[:size, :size] = _dwt_axis(block, fb, axis=0)
        size //= 2
    return coeffs


def tensor_idwt2(coeffs, bank, levels: int) -> np.ndarray:
    fb = get_bank(bank)
    out = as_gray_image(coeffs).copy()
    _check_square_pow2(out.shape, levels)
    size = out.shape[0] >> (levels - 1)
    for _ in range(levels):
        block = _idwt_axis(out[:size, :size], fb, axis=0)
        out[:size, :size] = _idwt_axis(block, fb, axis=1)
        size *= 2
    return out

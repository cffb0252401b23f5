"""Region-of-interest coding on the Haar coefficient tree.

With Haar filters and the maximal number of levels every coefficient has
exactly two children, so the coefficients a region influences are the
ancestors of its pixels.  Keeping them reconstructs the region exactly.
"""

from __future__ import annotations

import math

import numpy as np

from .analysis import CoeffId, coeff_offsets, largest_indices
from .codec import EncodedImage
from .errors import PreconditionError

__all__ = [
    "ancestors",
    "ancestor_mask",
    "roi_threshold",
    "keep_ancestors_only",
    "parse_labels",
]


def parse_labels(text: str) -> set:
    """Parse a comma-separated list of region labels."""
    try:
        labels = {int(tok) for tok in text.split(",") if tok.strip()}
    except ValueError:
        raise ValueError(f"region labels must be comma-separated integers, got {text!r}") from None
    if not labels:
        raise ValueError("no region labels given")
    return labels


def _check(enc: EncodedImage, roi_labels):
    if enc.bank != "haar":
        raise PreconditionError(f"ROI coding is defined for Haar filters only, stream uses {enc.bank}")
    size = enc.width
    if enc.height != size or size & (size - 1) or enc.mask is not None:
        raise PreconditionError("ROI coding needs a full square power-of-two image")
    if enc.levels != 2 * (size.bit_length() - 1):
        raise PreconditionError(
            f"ROI coding needs the full {2 * (size.bit_length() - 1)} levels, stream has {enc.levels}"
        )
    labels = sorted({int(lab) for lab in roi_labels})
    if not labels or labels[0] < 0 or labels[-1] >= enc.labelmap.region_count:
        raise PreconditionError(f"ROI labels {labels} outside 0..{enc.labelmap.region_count - 1}")
    return labels


def _ancestor_positions(enc: EncodedImage, roi_labels):
    """Yield ``(level, detail_indices)`` from the finest level down, then ``(0, approx_indices)``."""
    labels = _check(enc, roi_labels)
    in_roi = np.isin(enc.labelmap.labels.ravel(), labels)
    current = np.flatnonzero(in_roi)  # indices into the row-major support order
    perms = enc.permutations()
    for level in range(enc.levels, 0, -1):
        perm = perms[level - 1]
        inverse = np.empty_like(perm)
        inverse[perm] = np.arange(len(perm))
        current = np.unique(inverse[current] // 2)
        yield level, current
    yield 0, current


def ancestors(enc: EncodedImage, roi_labels) -> frozenset:
    """Every coefficient influenced by a pixel of the given regions."""
    return frozenset(
        CoeffId(level, int(i)) for level, idx in _ancestor_positions(enc, roi_labels) for i in idx
    )


def ancestor_mask(enc: EncodedImage, roi_labels) -> np.ndarray:
    """Boolean mask over the flat coefficient vector marking the ancestor set."""
    offsets = coeff_offsets(enc)
    mask = np.zeros(enc.coefficient_count, dtype=bool)
    for level, idx in _ancestor_positions(enc, roi_labels):
        mask[offsets[level] + idx] = True
    return mask


def keep_ancestors_only(enc: EncodedImage, roi_labels) -> EncodedImage:
    mask = ancestor_mask(enc, roi_labels)
    return enc.with_coefficients(np.where(mask, enc.coefficients(), 0.0))


def roi_threshold(enc: EncodedImage, roi_labels, roi_fraction: float, rest_fraction: float) -> EncodedImage:
    """Keep the largest ``roi_fraction`` of the ancestor coefficients and the
    largest ``rest_fraction`` of all others (counts rounded up)."""
    for frac in (roi_fraction, rest_fraction):
        if not 0.0 <= frac <= 1.0:
            raise ValueError(f"fractions must lie in [0, 1], got {frac}")
    inside = ancestor_mask(enc, roi_labels)
    coeffs = enc.coefficients()
    out = np.zeros_like(coeffs)
    for part, frac in ((np.flatnonzero(inside), roi_fraction), (np.flatnonzero(~inside), rest_fraction)):
        keep = part[largest_indices(coeffs[part], math.ceil(frac * len(part)))]
        out[keep] = coeffs[keep]
    return enc.with_coefficients(out)

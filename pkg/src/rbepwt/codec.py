"""Multi-level encoding and decoding along region paths.

At every level the current points are vectorised along a path, one level of
the periodic 1-D transform is applied, the details are stored and the points
at even path positions carry the approximation to the next level.

Point order conventions: the top level lists the support pixels row-major;
every lower level lists the surviving points in the order they were kept,
i.e. ``perm[0::2]`` of the level above.  A level's permutation ``perm``
indexes into that order, so ``signal = values[perm]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import FormatError, PreconditionError
from .imagecore import as_gray_image
from .paths import EUCLIDEAN, easy_order, epwt_order, grad_order
from .segmentation import LabelMap
from .wavelet import dwt_periodic, get_bank, idwt_periodic

__all__ = [
    "EASY",
    "GRAD",
    "EPWT",
    "MODES",
    "EncodedImage",
    "encode",
    "decode",
    "recompute_paths",
    "level_paths",
    "level_sizes",
    "full_levels",
    "region_gradients",
]

EASY = "easy"
GRAD = "grad"
EPWT = "epwt"
MODES = (EASY, GRAD, EPWT)


@dataclass(eq=False)
class EncodedImage:
    """Coefficients plus everything needed to replay the paths.

    ``details`` and ``perms`` are ordered from the coarsest level (1) to the
    finest (``levels``).  ``perms`` is only stored in EPWT mode and
    ``gradients`` (shape ``(region_count, 2)``, columns ``gx, gy``) only in
    grad mode.
    """

    mode: str
    bank: str
    levels: int
    width: int
    height: int
    labelmap: LabelMap
    approx: np.ndarray
    details: list
    gradients: np.ndarray | None = None
    perms: list | None = None
    mask: np.ndarray | None = None
    distance: str = EUCLIDEAN
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def coefficient_count(self) -> int:
        return len(self.approx) + sum(len(d) for d in self.details)

    def coefficients(self) -> np.ndarray:
        """All coefficients in canonical order: approximation, then details coarse to fine."""
        return np.concatenate([self.approx, *self.details])

    def with_coefficients(self, flat) -> "EncodedImage":
        """Copy of this encoding with the coefficient vector replaced."""
        flat = np.asarray(flat, dtype=np.float64).ravel()
        if len(flat) != self.coefficient_count:
            raise ValueError(f"expected {self.coefficient_count} coefficients, got {len(flat)}")
        bounds = np.cumsum([len(self.approx)] + [len(d) for d in self.details])
        parts = np.split(flat.copy(), bounds[:-1])
        return replace(self, approx=parts[0], details=parts[1:], _cache=self._cache)

    def support(self) -> np.ndarray:
        """Row-major ``(n, 2)`` coordinates of the encoded pixels."""
        if self.mask is None:
            return np.argwhere(np.ones((self.height, self.width), dtype=bool))
        return np.argwhere(self.mask)

    def permutations(self) -> list:
        """Per-level permutations, coarsest level first (recomputed when not stored)."""
        if self.perms is not None:
            return self.perms
        if "perms" not in self._cache:
            self._cache["perms"] = recompute_paths(
                self.labelmap, self.mode, self.levels, self.width, self.height,
                gradients=self.gradients, distance=self.distance, mask=self.mask,
            )
        return self._cache["perms"]

    def __eq__(self, other):
        if not isinstance(other, EncodedImage):
            return NotImplemented

        def same(a, b):
            if a is None or b is None:
                return a is b
            return np.array_equal(a, b)

        def same_list(a, b):
            if a is None or b is None:
                return a is b
            return len(a) == len(b) and all(np.array_equal(x, y) for x, y in zip(a, b))

        return (
            (self.mode, self.bank, self.levels, self.width, self.height, self.distance)
            == (other.mode, other.bank, other.levels, other.width, other.height, other.distance)
            and self.labelmap == other.labelmap
            and np.array_equal(self.approx, other.approx)
            and same_list(self.details, other.details)
            and same(self.gradients, other.gradients)
            and same_list(self.perms, other.perms)
            and same(self.mask, other.mask)
        )


def full_levels(n_points: int) -> int:
    """Largest level count ``L`` with ``2**L <= n_points``."""
    if n_points < 2:
        raise PreconditionError("need at least 2 points to apply one transform level")
    return n_points.bit_length() - 1


def level_sizes(n_points: int, levels: int) -> list:
    """Point counts per level, finest first: ``n, ceil(n/2), ...`` (``levels`` entries)."""
    sizes = [n_points]
    for _ in range(levels - 1):
        sizes.append(math.ceil(sizes[-1] / 2))
    return sizes


def region_gradients(img, lm: LabelMap, mask=None) -> np.ndarray:
    """Mean central-difference gradient per region, restricted to the support."""
    img = as_gray_image(img)
    gy = np.gradient(img, axis=0) if img.shape[0] > 1 else np.zeros_like(img)
    gx = np.gradient(img, axis=1) if img.shape[1] > 1 else np.zeros_like(img)
    labels = lm.labels.ravel().astype(np.int64)
    inside = np.ones(img.size, dtype=bool) if mask is None else np.asarray(mask, dtype=bool).ravel()
    counts = np.bincount(labels[inside], minlength=lm.region_count)
    out = np.zeros((lm.region_count, 2))
    for col, grad in enumerate((gx, gy)):
        sums = np.bincount(labels[inside], weights=grad.ravel()[inside], minlength=lm.region_count)
        np.divide(sums, counts, out=out[:, col], where=counts > 0)
    return out


def _level_order(coords, labels, mode, distance, gradients=None, values=None) -> np.ndarray:
    """Glued path for one level, as indices into the current point order."""
    if mode == EPWT:
        return epwt_order(coords, values, distance)
    by_region = np.lexsort((coords[:, 1], coords[:, 0], labels))
    sorted_labels = labels[by_region]
    cuts = np.flatnonzero(np.diff(sorted_labels)) + 1
    parts = []
    for idx in np.split(by_region, cuts):
        pts = coords[idx]
        if mode == EASY:
            order = easy_order(pts, distance)
        else:
            order = grad_order(pts, gradients[labels[idx[0]]], distance)
        parts.append(idx[order])
    return np.concatenate(parts)


def _check_mode(mode: str):
    if mode not in MODES:
        raise ValueError(f"unknown path mode {mode!r}; expected one of {MODES}")


def _support_coords(height, width, mask):
    if mask is None:
        return np.argwhere(np.ones((height, width), dtype=bool)).astype(np.int64)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (height, width):
        raise PreconditionError(f"mask shape {mask.shape} does not match image {height}x{width}")
    return np.argwhere(mask).astype(np.int64)


def _check_levels(levels: int, n_points: int):
    if levels < 1 or 2**levels > n_points:
        raise PreconditionError(
            f"levels={levels} too large: need 1 <= L and 2**L <= {n_points} encoded points"
        )


def encode(img, lm: LabelMap | None = None, mode: str = EASY, bank="cdf97",
           levels: int | None = None, distance: str = EUCLIDEAN, mask=None) -> EncodedImage:
    """Encode *img* with *levels* path-wavelet levels (default: as many as possible).

    In EPWT mode *lm* may be omitted; the paths are then stored explicitly.
    *mask* restricts the encoded support to an arbitrary pixel subset.
    """
    _check_mode(mode)
    fb = get_bank(bank)
    img = as_gray_image(img)
    height, width = img.shape
    if lm is None:
        if mode != EPWT:
            raise PreconditionError(f"mode {mode!r} needs a segmentation label map")
        lm = LabelMap.single_region(height, width)
    if lm.shape != img.shape:
        raise PreconditionError(f"label map {lm.width}x{lm.height} does not match image {width}x{height}")
    if mask is not None:
        mask = np.array(mask, dtype=bool)
    coords = _support_coords(height, width, mask)
    if levels is None:
        levels = full_levels(len(coords))
    _check_levels(levels, len(coords))

    gradients = region_gradients(img, lm, mask) if mode == GRAD else None
    values = img[coords[:, 0], coords[:, 1]]
    labels = lm.labels[coords[:, 0], coords[:, 1]].astype(np.int64)
    perms, details = [], []
    for _ in range(levels):
        perm = _level_order(coords, labels, mode, distance, gradients, values)
        approx, detail = dwt_periodic(values[perm], fb)
        perms.append(perm)
        details.append(detail)
        kept = perm[0::2]
        coords, labels, values = coords[kept], labels[kept], approx

    perms.reverse()
    details.reverse()
    enc = EncodedImage(
        mode=mode, bank=fb.name, levels=levels, width=width, height=height, labelmap=lm,
        approx=values, details=details, gradients=gradients,
        perms=perms if mode == EPWT else None, mask=mask, distance=distance,
    )
    if mode != EPWT:
        enc._cache["perms"] = perms
    return enc


def recompute_paths(lm: LabelMap, mode: str, levels: int, width: int, height: int,
                    gradients=None, distance: str = EUCLIDEAN, mask=None) -> list:
    """Replay the path cascade from the segmentation alone (no gray values).

    Returns the per-level permutations, coarsest level first, exactly as
    :func:`encode` produced them.
    """
    _check_mode(mode)
    if mode == EPWT:
        raise PreconditionError("EPWT paths depend on gray values and cannot be recomputed")
    if lm.shape != (height, width):
        raise PreconditionError("label map does not match the declared image size")
    if mode == GRAD:
        gradients = np.asarray(gradients, dtype=np.float64).reshape(-1, 2)
        if len(gradients) != lm.region_count:
            raise PreconditionError(f"expected {lm.region_count} region gradients, got {len(gradients)}")
    coords = _support_coords(height, width, mask)
    _check_levels(levels, len(coords))
    labels = lm.labels[coords[:, 0], coords[:, 1]].astype(np.int64)
    perms = []
    for _ in range(levels):
        perm = _level_order(coords, labels, mode, distance, gradients)
        perms.append(perm)
        kept = perm[0::2]
        coords, labels = coords[kept], labels[kept]
    perms.reverse()
    return perms


def _validate(enc: EncodedImage, n_points: int):
    _check_levels(enc.levels, n_points)
    sizes = level_sizes(n_points, enc.levels)[::-1]
    if len(enc.details) != enc.levels:
        raise FormatError(f"corrupt stream: {len(enc.details)} detail vectors for {enc.levels} levels")
    for n, detail in zip(sizes, enc.details):
        if len(detail) != n // 2:
            raise FormatError(f"corrupt stream: detail length {len(detail)} at a level of {n} points")
    if len(enc.approx) != (sizes[0] + 1) // 2:
        raise FormatError(f"corrupt stream: approximation length {len(enc.approx)}")


def decode(enc: EncodedImage) -> np.ndarray:
    """Invert the encoding; pixels outside the support are zero."""
    fb = get_bank(enc.bank)
    coords = _support_coords(enc.height, enc.width, enc.mask)
    _validate(enc, len(coords))
    perms = enc.permutations()
    values = np.asarray(enc.approx, dtype=np.float64)
    for perm, detail in zip(perms, enc.details):
        if len(perm) != len(detail) + len(values):
            raise FormatError("corrupt stream: permutation length does not match coefficients")
        signal = idwt_periodic(values, detail, fb, len(perm))
        values = np.empty(len(perm))
        values[perm] = signal
    out = np.zeros((enc.height, enc.width))
    out[coords[:, 0], coords[:, 1]] = values
    return out


def level_paths(enc: EncodedImage) -> dict:
    """Path coordinates per level: ``{level: (n, 2) array}`` with level 1 coarsest."""
    coords = enc.support()
    paths = {}
    perms = enc.permutations()
    for level in range(enc.levels, 0, -1):
        perm = perms[level - 1]
        paths[level] = coords[perm]
        coords = coords[perm[0::2]]
    return paths

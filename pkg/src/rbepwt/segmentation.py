"""Felzenszwalb-Huttenlocher graph segmentation and region bookkeeping.

The segmentation is the only side information the region based transform
stores, so everything here is deterministic: edges are visited in a fixed
total order and labels are renumbered canonically by first row-major
occurrence.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import ndimage

from .errors import FormatError
from .imagecore import as_gray_image

__all__ = [
    "LabelMap",
    "SegParams",
    "Edges",
    "gaussian_kernel",
    "gaussian_smooth",
    "build_graph",
    "fh_segment",
    "fh_main_pass",
    "perimeter",
    "region_points",
    "load_labelmap",
    "save_labelmap",
]


@dataclass(frozen=True, eq=False)
class LabelMap:
    """Per-pixel region labels, exactly ``0 .. region_count - 1``."""

    labels: np.ndarray

    def __post_init__(self):
        labels = np.ascontiguousarray(self.labels, dtype=np.uint32)
        if labels.ndim != 2 or labels.size == 0:
            raise ValueError(f"label map must be a non-empty 2-D array, got {labels.shape}")
        count = int(labels.max()) + 1
        if np.bincount(labels.ravel(), minlength=count).min() == 0:
            raise ValueError("labels must be exactly 0..r-1 with every label present")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_count", count)

    @classmethod
    def from_labels(cls, raw) -> "LabelMap":
        """Build a map from arbitrary integer labels, renumbered canonically."""
        return cls(canonical_labels(raw))

    @classmethod
    def single_region(cls, height: int, width: int) -> "LabelMap":
        return cls(np.zeros((height, width), dtype=np.uint32))

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def shape(self):
        return self.labels.shape

    @property
    def region_count(self) -> int:
        return self._count

    def __eq__(self, other):
        if not isinstance(other, LabelMap):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.labels, other.labels))

    def __repr__(self):
        return f"LabelMap({self.width}x{self.height}, regions={self.region_count})"


def canonical_labels(raw) -> np.ndarray:
    """Renumber labels 0, 1, ... in order of first row-major occurrence."""
    raw = np.asarray(raw)
    flat = raw.ravel()
    uniq, first, inverse = np.unique(flat, return_index=True, return_inverse=True)
    rank = np.empty(len(uniq), dtype=np.uint32)
    rank[np.argsort(first, kind="stable")] = np.arange(len(uniq), dtype=np.uint32)
    return rank[inverse.ravel()].reshape(raw.shape)


@dataclass(frozen=True)
class SegParams:
    k: float = 200.0
    sigma: float = 2.0
    min_size: int = 10

    def __post_init__(self):
        if self.k < 0 or self.sigma < 0 or self.min_size < 0:
            raise ValueError("k, sigma and min_size must all be non-negative")


class Edges(NamedTuple):
    """8-neighbour graph edges as parallel arrays.

    ``lo`` and ``hi`` are the row-major ranks of the two endpoints with
    ``lo < hi``.
    """

    lo: np.ndarray
    hi: np.ndarray
    weight: np.ndarray

    def __len__(self):
        return len(self.weight)


def gaussian_kernel(sigma: float) -> np.ndarray:
    radius = int(math.ceil(4.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-0.5 * (x / sigma) ** 2)
    return kernel / kernel.sum()


def gaussian_smooth(img, sigma: float) -> np.ndarray:
    """Separable Gaussian blur with a ``ceil(4 sigma)`` radius and mirror boundary.

    ``sigma`` is a standard deviation in pixels; ``sigma == 0`` returns the
    image unchanged.
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    img = as_gray_image(img)
    if sigma == 0:
        return img
    kernel = gaussian_kernel(sigma)
    out = ndimage.correlate1d(img, kernel, axis=0, mode="reflect")
    return ndimage.correlate1d(out, kernel, axis=1, mode="reflect")


# (drow, dcol) steps that enumerate every unordered 8-neighbour pair once
_NEIGHBOUR_STEPS = ((0, 1), (1, 0), (1, 1), (1, -1))


def build_graph(img) -> Edges:
    """All 8-neighbour edges of the pixel grid, weighted by absolute gray difference."""
    img = as_gray_image(img)
    height, width = img.shape
    ranks = np.arange(height * width, dtype=np.int64).reshape(height, width)
    lo_parts, hi_parts, w_parts = [], [], []
    for dr, dc in _NEIGHBOUR_STEPS:
        c0, c1 = max(0, -dc), width - max(0, dc)
        a = (slice(0, height - dr), slice(c0, c1))
        b = (slice(dr, height), slice(c0 + dc, c1 + dc))
        lo_parts.append(ranks[a].ravel())
        hi_parts.append(ranks[b].ravel())
        w_parts.append(np.abs(img[a] - img[b]).ravel())
    return Edges(np.concatenate(lo_parts), np.concatenate(hi_parts), np.concatenate(w_parts))


class _Forest:
    """Disjoint-set forest with component sizes and internal differences."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.internal = [0.0] * n

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int, weight: float) -> int:
        """Join roots *a* and *b* through an edge of *weight*; return the new root."""
        if self.size[a] < self.size[b]:
            a, b = b, a
        self.parent[b] = a
        self.size[a] += self.size[b]
        self.internal[a] = max(self.internal[a], self.internal[b], weight)
        return a


def _sorted_edges(edges: Edges):
    order = np.lexsort((edges.hi, edges.lo, edges.weight))
    return edges.lo[order].tolist(), edges.hi[order].tolist(), edges.weight[order].tolist()


def fh_main_pass(img, k: float, tau: Callable[[int], float] | None = None):
    """Run the greedy merge pass on an already smoothed image.

    Returns the forest together with the sorted edge lists so callers can run
    the small-component post-merge or inspect ``internal`` per component.
    """
    img = as_gray_image(img)
    if tau is None:
        def tau(size: int) -> float:
            return k / size

    lo, hi, weight = _sorted_edges(build_graph(img))
    forest = _Forest(img.size)
    find, size, internal = forest.find, forest.size, forest.internal
    for a, b, w in zip(lo, hi, weight):
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        if w <= min(internal[ra] + tau(size[ra]), internal[rb] + tau(size[rb])):
            forest.union(ra, rb, w)
    return forest, (lo, hi, weight)


def fh_segment(img, params: SegParams | None = None, tau: Callable[[int], float] | None = None) -> LabelMap:
    """Segment *img* into regions of low internal gray-value variation.

    *tau* replaces the default threshold function ``k / |C|``; it receives
    the component size.
    """
    params = params or SegParams()
    img = as_gray_image(img)
    smoothed = gaussian_smooth(img, params.sigma)
    forest, (lo, hi, weight) = fh_main_pass(smoothed, params.k, tau)

    if params.min_size > 0:
        find, size = forest.find, forest.size
        for a, b, w in zip(lo, hi, weight):
            ra, rb = find(a), find(b)
            if ra != rb and (size[ra] < params.min_size or size[rb] < params.min_size):
                forest.union(ra, rb, w)

    roots = np.fromiter((forest.find(i) for i in range(img.size)), dtype=np.int64, count=img.size)
    return LabelMap.from_labels(roots.reshape(img.shape))


def perimeter(lm: LabelMap) -> int:
    """Number of 4-adjacent pixel pairs whose labels differ."""
    labels = lm.labels
    horizontal = np.count_nonzero(labels[:, 1:] != labels[:, :-1])
    vertical = np.count_nonzero(labels[1:, :] != labels[:-1, :])
    return int(horizontal + vertical)


def region_points(lm: LabelMap, label: int) -> np.ndarray:
    """Coordinates ``(row, col)`` of region *label*, row-major."""
    if not 0 <= label < lm.region_count:
        raise ValueError(f"unknown region label {label} (map has {lm.region_count} regions)")
    return np.argwhere(lm.labels == label).astype(np.int64)


_LABEL_MAGIC = b"P2L"


def save_labelmap(lm: LabelMap, path) -> None:
    """Write the plain-text label format: magic, width, height, region count, labels."""
    lines = [_LABEL_MAGIC.decode(), f"{lm.width} {lm.height}", str(lm.region_count)]
    lines.extend(" ".join(map(str, row)) for row in lm.labels.tolist())
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_labelmap(path) -> LabelMap:
    with open(path, "rb") as fh:
        data = fh.read()
    tokens = [t for t in re.findall(rb"#[^\n\r]*|\S+", data) if not t.startswith(b"#")]
    if len(tokens) < 4 or tokens[0] != _LABEL_MAGIC:
        raise FormatError("malformed header: not a P2L label file")
    try:
        width, height, count = (int(t) for t in tokens[1:4])
        values = [int(t) for t in tokens[4:]]
    except ValueError:
        raise FormatError("malformed label file: non-integer token") from None
    if width < 1 or height < 1:
        raise FormatError(f"malformed header: bad size {width}x{height}")
    if len(values) < width * height:
        raise FormatError(f"truncated payload: expected {width * height} labels, got {len(values)}")
    labels = np.array(values[: width * height], dtype=np.int64).reshape(height, width)
    if labels.min() < 0 or labels.max() >= count:
        raise FormatError("label outside declared region count")
    try:
        return LabelMap(labels)
    except ValueError as exc:
        raise FormatError(str(exc)) from None

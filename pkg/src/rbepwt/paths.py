"""Deterministic path finders over finite sets of grid points.

A path is an ``(n, 2)`` integer array of ``(row, col)`` coordinates visiting
every point of its support exactly once.  Direction vectors live in the
``(col, row)`` plane: ``(1, 0)`` is one step towards increasing column, and a
quarter turn maps ``(x, y)`` to ``(-y, x)``.

Distances are compared exactly as integers (squared Euclidean or Chebyshev),
so candidate ties are never a matter of floating-point noise.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .imagecore import as_gray_image, sort_row_major

__all__ = [
    "EUCLIDEAN",
    "CHEBYSHEV",
    "RegionGradient",
    "easy_path",
    "grad_path",
    "epwt_path",
    "easy_order",
    "grad_order",
    "epwt_order",
    "compute_region_gradient",
    "glue_paths",
    "decimate",
    "path_to_csv",
]

EUCLIDEAN = "euclidean"
CHEBYSHEV = "chebyshev"
_METRICS = (EUCLIDEAN, CHEBYSHEV)

# below this norm a region gradient carries no direction
_ZERO_GRADIENT = 1e-12
_MAX_ROTATIONS = 4


class RegionGradient(NamedTuple):
    """Average gray-value gradient of a region; ``gx`` along columns, ``gy`` along rows."""

    gx: float
    gy: float


def _distance(dr: int, dc: int, metric: str) -> int:
    if metric == EUCLIDEAN:
        return dr * dr + dc * dc
    return max(abs(dr), abs(dc))


@lru_cache(maxsize=16)
def _offset_groups(metric: str, radius: int):
    """Offsets with ``|dr|, |dc| < radius`` grouped by increasing distance.

    Each group is a list of ``(key_delta, dr, dc)`` where ``key_delta`` is the
    offset in the flattened key space of stride ``2 * radius + 1``.
    """
    stride = 2 * radius + 1
    span = np.arange(-radius + 1, radius)
    dr, dc = (a.ravel() for a in np.meshgrid(span, span, indexing="ij"))
    dist = dr * dr + dc * dc if metric == EUCLIDEAN else np.maximum(np.abs(dr), np.abs(dc))
    keep = dist > 0
    dr, dc, dist = dr[keep], dc[keep], dist[keep]
    order = np.lexsort((dc, dr, dist))
    dr, dc, dist = dr[order], dc[order], dist[order]
    bounds = np.flatnonzero(np.diff(dist)) + 1
    groups = []
    for lo, hi in zip(np.r_[0, bounds], np.r_[bounds, len(dist)]):
        groups.append([(int(r) * stride + int(c), int(r), int(c)) for r, c in zip(dr[lo:hi], dc[lo:hi])])
    return stride, groups


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.int64).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("cannot build a path over an empty point set")
    return pts


def _greedy(points: np.ndarray, metric: str, choose) -> np.ndarray:
    """Shared greedy walk: repeatedly move to one of the nearest unvisited points.

    ``choose(current, candidates)`` receives the current point index and a
    list of ``(index, dr, dc)`` candidates at minimal distance and returns
    the chosen candidate.
    """
    if metric not in _METRICS:
        raise ValueError(f"unknown distance {metric!r}")
    n = len(points)
    rows = points[:, 0].tolist()
    cols = points[:, 1].tolist()
    start = int(np.lexsort((points[:, 1], points[:, 0]))[0])
    if n == 1:
        return np.array([start], dtype=np.int64)

    r0, c0 = min(rows), min(cols)
    radius = 1
    while radius < max(max(rows) - r0, max(cols) - c0) + 1:
        radius *= 2
    stride, groups = _offset_groups(metric, radius)
    avail = {(r - r0) * stride + (c - c0): i for i, (r, c) in enumerate(zip(rows, cols))}
    if len(avail) != n:
        raise ValueError("point set contains duplicates")

    order = [start]
    cur = start
    del avail[(rows[cur] - r0) * stride + (cols[cur] - c0)]
    while avail:
        cr, cc = rows[cur], cols[cur]
        base = (cr - r0) * stride + (cc - c0)
        cands = None
        budget = len(avail)
        for group in groups:
            found = [(avail[base + delta], dr, dc) for delta, dr, dc in group if base + delta in avail]
            if found:
                cands = found
                break
            budget -= len(group)
            if budget < 0:
                break
        if cands is None:
            best = None
            for i in avail.values():
                dr, dc = rows[i] - cr, cols[i] - cc
                d = _distance(dr, dc, metric)
                if best is None or d < best:
                    best, cands = d, [(i, dr, dc)]
                elif d == best:
                    cands.append((i, dr, dc))
        cur = choose(cur, cands)[0]
        del avail[(rows[cur] - r0) * stride + (cols[cur] - c0)]
        order.append(cur)
    return np.array(order, dtype=np.int64)


def _row_major_first(cands):
    return min(cands, key=lambda c: (c[1], c[2]))


def easy_order(points, distance: str = EUCLIDEAN) -> np.ndarray:
    """Easy-path visiting order as indices into *points*."""
    points = _as_points(points)
    v = [1, 0]

    def choose(cur, cands):
        if len(cands) > 1:
            vx, vy = v
            for _ in range(_MAX_ROTATIONS):
                scores = [dc * vx + dr * vy for _, dr, dc in cands]
                top = max(scores)
                cands = [c for c, s in zip(cands, scores) if s == top]
                if len(cands) == 1:
                    break
                vx, vy = -vy, vx
            else:
                cands = [_row_major_first(cands)]
        pick = cands[0]
        v[0], v[1] = pick[2], pick[1]
        return pick

    return _greedy(points, distance, choose)


def grad_order(points, gradient, distance: str = EUCLIDEAN) -> np.ndarray:
    """Grad-path visiting order as indices into *points*."""
    gx, gy = float(gradient[0]), float(gradient[1])
    if np.hypot(gx, gy) < _ZERO_GRADIENT:
        return easy_order(points, distance)
    points = _as_points(points)
    wx, wy = -gy, gx
    v = [wx, wy]

    def choose(cur, cands):
        if len(cands) > 1:
            vx, vy = v
            for _ in range(_MAX_ROTATIONS):
                scores = [abs(dc * vx + dr * vy) for _, dr, dc in cands]
                top = max(scores)
                cands = [c for c, s in zip(cands, scores) if s == top]
                if len(cands) == 1:
                    break
                vx, vy = -vy, vx
            else:
                cands = [_row_major_first(cands)]
        pick = cands[0]
        if pick[2] * wx + pick[1] * wy >= 0:
            v[0], v[1] = wx, wy
        else:
            v[0], v[1] = -wx, -wy
        return pick

    return _greedy(points, distance, choose)


def epwt_order(points, values, distance: str = EUCLIDEAN) -> np.ndarray:
    """Data-driven greedy order: nearest points first, then the closest gray value."""
    points = _as_points(points)
    vals = np.asarray(values, dtype=np.float64).ravel()
    if len(vals) != len(points):
        raise ValueError(f"{len(points)} points but {len(vals)} values")
    vals = vals.tolist()
    last = [1, 0]

    def choose(cur, cands):
        if len(cands) > 1:
            here = vals[cur]
            diffs = [abs(vals[i] - here) for i, _, _ in cands]
            low = min(diffs)
            cands = [c for c, d in zip(cands, diffs) if d == low]
        if len(cands) > 1:
            scores = [dc * last[0] + dr * last[1] for _, dr, dc in cands]
            top = max(scores)
            cands = [c for c, s in zip(cands, scores) if s == top]
        if len(cands) > 1:
            cands = [_row_major_first(cands)]
        pick = cands[0]
        last[0], last[1] = pick[2], pick[1]
        return pick

    return _greedy(points, distance, choose)


def easy_path(region, distance: str = EUCLIDEAN) -> np.ndarray:
    """Path through *region* that depends only on its geometry."""
    region = _as_points(region)
    return region[easy_order(region, distance)]


def grad_path(region, gradient, distance: str = EUCLIDEAN) -> np.ndarray:
    """Path through *region* that prefers moving perpendicular to *gradient*."""
    region = _as_points(region)
    return region[grad_order(region, gradient, distance)]


def epwt_path(points, values, distance: str = EUCLIDEAN) -> np.ndarray:
    points = _as_points(points)
    return points[epwt_order(points, values, distance)]


def compute_region_gradient(img, region) -> RegionGradient:
    """Mean of per-pixel central differences over *region*.

    Differences are one-sided on the image border and zero along an axis of
    length one.
    """
    img = as_gray_image(img)
    region = _as_points(region)
    rows, cols = region[:, 0], region[:, 1]
    gy = np.gradient(img, axis=0) if img.shape[0] > 1 else np.zeros_like(img)
    gx = np.gradient(img, axis=1) if img.shape[1] > 1 else np.zeros_like(img)
    return RegionGradient(float(gx[rows, cols].mean()), float(gy[rows, cols].mean()))


def glue_paths(paths) -> np.ndarray:
    """Concatenate per-region paths in the given (label) order."""
    parts = [np.asarray(p, dtype=np.int64).reshape(-1, 2) for p in paths]
    if not parts:
        return np.empty((0, 2), dtype=np.int64)
    glued = np.concatenate(parts)
    if len(np.unique(glued, axis=0)) != len(glued):
        raise ValueError("paths overlap: supports must be pairwise disjoint")
    return glued


def decimate(path):
    """Keep the points at even path positions.

    Returns ``(kept_sorted, kept_in_path_order)``.
    """
    path = np.asarray(path, dtype=np.int64).reshape(-1, 2)
    kept = path[0::2]
    return sort_row_major(kept), kept


def path_to_csv(path) -> str:
    lines = ["step,row,col"]
    lines.extend(f"{i},{r},{c}" for i, (r, c) in enumerate(np.asarray(path).tolist()))
    return "\n".join(lines) + "\n"

"""Synthetic test images."""

from __future__ import annotations

import numpy as np

__all__ = ["cartoon", "CARTOON_LEVELS"]

# contrast chosen so the default segmentation (k=200, sigma=2, min_size=10)
# recovers the four regions
CARTOON_LEVELS = (100.0, 116.0, 132.0, 148.0)


def cartoon(size: int = 64, levels=CARTOON_LEVELS) -> np.ndarray:
    """Piecewise-constant image with four regions: background, a slanted
    half-plane, a disc and a rectangle.  None of the boundaries is dyadic."""
    r, c = np.mgrid[0:size, 0:size] / size
    img = np.full((size, size), float(levels[0]))
    img[c + 0.35 * r > 0.55] = levels[1]
    img[(r - 0.3) ** 2 + (c - 0.3) ** 2 < 0.04] = levels[2]
    img[(r > 0.7) & (c > 0.2) & (c < 0.5)] = levels[3]
    return img

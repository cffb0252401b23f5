import numpy as np
import pytest

from rbepwt.segmentation import LabelMap


def random_labelmap(rng, height, width, max_regions=6, scatter=0.0):
    """Voronoi partition from random seeds, optionally with scattered relabelled pixels."""
    n_seeds = int(rng.integers(1, max_regions + 1))
    seeds = np.column_stack([rng.integers(0, height, n_seeds), rng.integers(0, width, n_seeds)])
    r, c = np.mgrid[0:height, 0:width]
    dist = (r[..., None] - seeds[:, 0]) ** 2 + (c[..., None] - seeds[:, 1]) ** 2
    raw = np.argmin(dist, axis=-1)
    if scatter:
        flip = rng.random((height, width)) < scatter
        raw[flip] = rng.integers(0, n_seeds, flip.sum())
    return LabelMap.from_labels(raw)


def random_image(rng, height, width):
    return rng.integers(0, 256, (height, width)).astype(np.float64)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

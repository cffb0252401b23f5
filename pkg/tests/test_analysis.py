import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_image, random_labelmap
from rbepwt.analysis import (
    METRICS_HEADER,
    CoeffId,
    basis_element,
    coeff_offsets,
    keep_n_largest,
    largest_indices,
    metrics_row,
    psnr_paper,
    psnr_std,
    tensor_n_term,
)
from rbepwt.codec import EASY, EPWT, GRAD, decode, encode
from rbepwt.roi import ancestor_mask
from rbepwt.segmentation import LabelMap
from rbepwt.wavelet import tensor_dwt2


def test_largest_indices_small():
    assert sorted(largest_indices([3, -5, 2], 2).tolist()) == [0, 1]


def test_largest_indices_ties_prefer_lower_index():
    assert largest_indices([1, -2, 2, -1, 2], 2).tolist() == [1, 2]
    assert largest_indices([1, -1, 1], 1).tolist() == [0]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=30), st.data())
def test_largest_indices_sort_replay(values, data):
    n = data.draw(st.integers(0, len(values)))
    replay = sorted(range(len(values)), key=lambda i: (-abs(values[i]), i))[:n]
    assert largest_indices(values, n).tolist() == replay


def test_keep_n_largest_flat_example(rng):
    enc = encode(random_image(rng, 1, 3), LabelMap.single_region(1, 3), EASY, "haar", levels=1)
    enc = enc.with_coefficients([3.0, -5.0, 2.0])
    assert keep_n_largest(enc, 2).coefficients().tolist() == [3.0, -5.0, 0.0]


def test_keep_n_largest_all_and_none(rng):
    enc = encode(random_image(rng, 8, 8), random_labelmap(rng, 8, 8), GRAD, "cdf97")
    assert np.array_equal(keep_n_largest(enc, 64).coefficients(), enc.coefficients())
    assert not keep_n_largest(enc, 0).coefficients().any()
    with pytest.raises(ValueError):
        keep_n_largest(enc, 65)
    with pytest.raises(ValueError):
        keep_n_largest(enc, -1)


def test_keep_n_largest_leaves_metadata(rng):
    enc = encode(random_image(rng, 8, 8), random_labelmap(rng, 8, 8), EPWT, "haar")
    out = keep_n_largest(enc, 10)
    assert out.labelmap == enc.labelmap and out.levels == enc.levels and out.mode == enc.mode
    assert np.array_equal(out.support(), enc.support())


def test_keep_512_on_256(rng):
    data = pytest.importorskip("skimage.data")
    img = data.camera().astype(float)
    enc = encode(img, LabelMap.single_region(*img.shape), EASY, "cdf97")
    assert np.count_nonzero(keep_n_largest(enc, 512).coefficients()) == 512


def test_psnr_paper_closed_forms():
    f = np.zeros((5, 7))
    assert psnr_paper(f, f) == math.inf
    g = f.copy()
    g[2, 3] = 255
    assert psnr_paper(f, g) == 0.0
    with pytest.raises(ValueError):
        psnr_paper(f, np.zeros((7, 5)))


def test_psnr_std_closed_forms():
    f = np.full((9, 4), 100.0)
    assert psnr_std(f, f + 1) == pytest.approx(10 * math.log10(255**2), abs=1e-6)
    assert psnr_std(f, f + 1) == pytest.approx(48.1308036, abs=1e-6)
    assert psnr_std(np.zeros((3, 3)), np.full((3, 3), 255.0)) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        psnr_std(f, f)


def test_psnr_formula_oracles(rng):
    for _ in range(20):
        f, g = random_image(rng, 6, 5), random_image(rng, 6, 5)
        if np.array_equal(f, g):
            continue
        diff = (f - g).ravel()
        norm = math.sqrt(sum(d * d for d in diff))
        assert abs(psnr_paper(f, g) - 20 * math.log(255 / norm, 2)) < 1e-12
        mse = sum(d * d for d in diff) / len(diff)
        assert abs(psnr_std(f, g) - 10 * math.log10(65025 / mse)) < 1e-9


def test_psnr_decreasing(rng):
    f = random_image(rng, 8, 8)
    noise = rng.standard_normal((8, 8))
    printed = [psnr_paper(f, f + s * noise) for s in (0.5, 1, 2, 4, 8)]
    std = [psnr_std(f, f + s * noise) for s in (0.5, 1, 2, 4, 8)]
    assert all(a > b for a, b in zip(printed, printed[1:]))
    assert all(a > b for a, b in zip(std, std[1:]))


@pytest.mark.parametrize("size,levels", [(4, 4), (8, 6), (16, 8)])
def test_basis_approx_constant(size, levels):
    img = np.zeros((size, size))
    enc = encode(img, LabelMap.single_region(size, size), EASY, "haar", levels=levels)
    elem = basis_element(enc, CoeffId(0, 0))
    assert elem.shape == (size, size)
    count = size * size >> levels
    expected = (1 / math.sqrt(2)) ** levels
    values = np.sort(elem.ravel())
    # full levels reach every pixel; partial levels spread over the points of one approx block
    if count == 1:
        assert np.allclose(elem, expected, atol=1e-12)
    else:
        nz = values[np.abs(values) > 1e-12]
        assert np.allclose(nz, expected, atol=1e-12) and len(nz) == 1 << levels


def test_basis_invalid_id(rng):
    enc = encode(random_image(rng, 4, 4), None, EPWT, "haar")
    with pytest.raises(ValueError):
        basis_element(enc, CoeffId(1, 3))
    with pytest.raises(ValueError):
        basis_element(enc, CoeffId(9, 0))


@pytest.mark.parametrize("mode", [EASY, GRAD, EPWT])
@pytest.mark.parametrize("bank", ["haar", "cdf97"])
def test_superposition(rng, mode, bank):
    img = random_image(rng, 8, 8)
    enc = encode(img, random_labelmap(rng, 8, 8), mode, bank)
    coeffs = enc.coefficients()
    offsets = coeff_offsets(enc)
    total = np.zeros((8, 8))
    for level in range(enc.levels + 1):
        for index in range(offsets[level + 1] - offsets[level]):
            total += coeffs[offsets[level] + index] * basis_element(enc, CoeffId(level, index))
    assert np.abs(total - decode(enc)).max() < 1e-8
    assert np.abs(total - img).max() < 1e-8


def test_threshold_error_is_discarded_part(rng):
    img = random_image(rng, 8, 8)
    enc = encode(img, random_labelmap(rng, 8, 8), GRAD, "cdf97")
    kept = keep_n_largest(enc, 12)
    rest = enc.with_coefficients(enc.coefficients() - kept.coefficients())
    assert np.abs(img - decode(kept) - decode(rest)).max() < 1e-8


def test_support_containment(rng):
    for _ in range(6):
        lm = random_labelmap(rng, 4, 4, max_regions=4)
        enc = encode(random_image(rng, 4, 4), lm, EASY, "haar")
        offsets = coeff_offsets(enc)
        masks = [ancestor_mask(enc, {r}) for r in range(lm.region_count)]
        for flat in range(enc.coefficient_count):
            level = int(np.searchsorted(offsets, flat, side="right") - 1)
            elem = basis_element(enc, CoeffId(level, flat - offsets[level]))
            feeding = np.zeros((4, 4), dtype=bool)
            for r, m in enumerate(masks):
                if m[flat]:
                    feeding |= lm.labels == r
            assert np.abs(elem[~feeding]).max(initial=0.0) < 1e-12


def test_tensor_n_term(rng):
    img = random_image(rng, 16, 16)
    assert np.abs(tensor_n_term(img, "cdf97", 256) - img).max() < 1e-9
    approx = tensor_n_term(img, "haar", 10)
    assert np.count_nonzero(np.abs(tensor_dwt2(approx, "haar", 4)) > 1e-9) <= 10
    with pytest.raises(ValueError):
        tensor_n_term(random_image(rng, 12, 12), "haar", 4)


def test_metrics_row():
    f = np.zeros((2, 2))
    assert METRICS_HEADER == "image,mode,bank,n_coeffs,psnr_paper,psnr_std"
    row = metrics_row("img", "easy", "haar", 5, f, f + 1)
    name, mode, bank, n, printed, std = row.split(",")
    assert (name, mode, bank, n) == ("img", "easy", "haar", "5")
    assert float(printed) == pytest.approx(20 * math.log2(255 / 2), abs=1e-6)
    assert float(std) == pytest.approx(48.130804, abs=1e-6)
    assert metrics_row("a", "b", "c", 1, f, f).endswith("inf,inf")

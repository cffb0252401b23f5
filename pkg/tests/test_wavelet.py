import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import dwt_oracle
from rbepwt.wavelet import (
    CDF97,
    HAAR,
    check_perfect_reconstruction,
    dwt_periodic,
    get_bank,
    idwt_periodic,
    tensor_dwt2,
    tensor_idwt2,
)

BANKS = [HAAR, CDF97]
R2 = math.sqrt(2.0)


def test_haar_taps():
    assert np.allclose(HAAR.analysis_low, [1 / R2, 1 / R2])
    assert np.allclose(HAAR.analysis_high, [1 / R2, -1 / R2])


@pytest.mark.parametrize("bank", BANKS, ids=lambda b: b.name)
def test_dc_gain_sqrt2(bank):
    assert abs(sum(bank.analysis_low) - R2) < 1e-12
    assert abs(sum(bank.analysis_high)) < 1e-12


def test_cdf97_is_symmetric():
    assert np.allclose(CDF97.analysis_low, CDF97.analysis_low[::-1])
    assert np.allclose(CDF97.analysis_high, CDF97.analysis_high[::-1])
    assert len(CDF97.analysis_low) == 9 and len(CDF97.analysis_high) == 7


@pytest.mark.parametrize("bank", BANKS, ids=lambda b: b.name)
def test_constant_signal(bank):
    c = 3.25
    a, d = dwt_periodic(np.full(8, c), bank)
    assert np.allclose(a, c * R2, atol=1e-12) and np.allclose(d, 0, atol=1e-12)


def test_haar_unit_impulse():
    a, d = dwt_periodic([1.0, 0.0], HAAR)
    assert np.allclose(a, [1 / R2]) and np.allclose(d, [1 / R2])


@pytest.mark.parametrize("bank", BANKS, ids=lambda b: b.name)
def test_matches_circulant_oracle(rng, bank):
    x = rng.standard_normal(16)
    a, d = dwt_periodic(x, bank)
    oa, od = dwt_oracle(x, bank)
    assert np.abs(a - oa).max() < 1e-12 and np.abs(d - od).max() < 1e-12


def test_haar_inverse_of_constant():
    assert np.allclose(idwt_periodic(np.full(4, 2 * R2), np.zeros(4), HAAR, 8), 2.0)


@pytest.mark.parametrize("bank", BANKS, ids=lambda b: b.name)
def test_roundtrip_many_even(rng, bank):
    worst = 0.0
    for _ in range(1000):
        n = 2 * int(rng.integers(1, 40))
        x = rng.standard_normal(n) * 100
        worst = max(worst, np.abs(idwt_periodic(*dwt_periodic(x, bank), bank, n) - x).max())
    assert worst < 1e-10


@pytest.mark.parametrize("bank", BANKS, ids=lambda b: b.name)
def test_odd_holdout(rng, bank):
    x = rng.standard_normal(7)
    a, d = dwt_periodic(x, bank)
    assert len(a) == 4 and len(d) == 3 and a[-1] == x[-1]
    y = idwt_periodic(a, d, bank, 7)
    assert y[-1] == x[-1]
    assert np.abs(y - x).max() < 1e-12


def test_short_signal_rejected():
    with pytest.raises(ValueError):
        dwt_periodic([1.0], HAAR)


def test_inconsistent_lengths_rejected():
    with pytest.raises(ValueError):
        idwt_periodic(np.zeros(3), np.zeros(3), HAAR, 8)


def test_haar_energy(rng):
    x = rng.standard_normal(32)
    a, d = dwt_periodic(x, HAAR)
    assert abs((a @ a + d @ d) - x @ x) <= 1e-10 * (x @ x)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-5, 5), st.floats(-5, 5), st.sampled_from(["haar", "cdf97"]))
def test_linearity(seed, alpha, beta, bank):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 30))
    x, y = rng.standard_normal(n), rng.standard_normal(n)
    lhs = dwt_periodic(alpha * x + beta * y, bank)
    tx, ty = dwt_periodic(x, bank), dwt_periodic(y, bank)
    for part in range(2):
        assert np.abs(lhs[part] - (alpha * tx[part] + beta * ty[part])).max() < 1e-10


def test_self_check():
    assert check_perfect_reconstruction(CDF97) < 1e-10


def test_self_check_catches_bad_taps():
    from dataclasses import replace

    broken = replace(CDF97, analysis_low=tuple(np.array(CDF97.analysis_low) * (1 + 1e-6)))
    with pytest.raises(RuntimeError):
        check_perfect_reconstruction(broken)


def test_get_bank():
    assert get_bank("haar") is HAAR
    with pytest.raises(ValueError):
        get_bank("db4")


class TestTensor:
    def test_constant_details_zero(self):
        c = tensor_dwt2(np.full((16, 16), 77.0), CDF97, 4)
        details = c.copy()
        details[0, 0] = 0
        assert np.abs(details).max() < 1e-9

    def test_roundtrip(self, rng):
        img = rng.random((64, 64)) * 255
        assert np.abs(tensor_idwt2(tensor_dwt2(img, CDF97, 6), CDF97, 6) - img).max() < 1e-9

    def test_haar_two_by_two(self):
        a, b, c, d = 1.0, 5.0, 2.0, 9.0
        coeffs = tensor_dwt2([[a, b], [c, d]], HAAR, 1)
        assert abs(coeffs[0, 0] - (a + b + c + d) / 2) < 1e-12

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            tensor_dwt2(np.zeros((12, 12)), HAAR, 1)
        with pytest.raises(ValueError):
            tensor_dwt2(np.zeros((8, 8)), HAAR, 4)

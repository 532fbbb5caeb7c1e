import numpy as np
import pytest
from skimage.metrics import structural_similarity

from adaptcs.metrics import lowest_fraction_mean, psnr, ssim, ssim_loss
from oracles import ssim_direct


def test_psnr_values():
    ref = np.zeros((4, 4))
    ref[0, 0] = 1
    assert psnr(ref, ref) == np.inf
    assert np.isclose(psnr(ref, ref + 1.0), 0.0)
    assert np.isclose(psnr(ref, ref + 0.01), 40.0)


def test_psnr_errors():
    with pytest.raises(ValueError):
        psnr(np.zeros((3, 3)), np.ones((3, 3)))
    with pytest.raises(ValueError):
        psnr(np.ones((3, 3)), np.ones((3, 4)))


def test_ssim_identity(rng):
    x = rng.random((16, 16))
    assert abs(ssim(x, x) - 1) < 1e-12
    assert ssim_loss(x, x) < 1e-12


def test_ssim_constants_closed_form():
    ref = np.full((10, 10), 0.4)
    test = ref + 0.5
    c1 = (0.01 * 0.4) ** 2
    expected = (2 * 0.4 * 0.9 + c1) / (0.4**2 + 0.9**2 + c1)
    assert np.isclose(ssim(ref, test), expected, rtol=1e-12)


def test_ssim_matches_direct_summation(rng):
    for _ in range(20):
        a, b = rng.random((32, 32)), rng.random((32, 32))
        assert abs(ssim(a, b) - ssim_direct(a, b)) < 1e-8


def test_ssim_matches_skimage(rng):
    a = rng.random((24, 24))
    b = np.clip(a + 0.1 * rng.standard_normal(a.shape), 0, 1)
    ref = structural_similarity(a, b, win_size=7, data_range=a.max(), gaussian_weights=False, use_sample_covariance=True)
    # skimage crops the border half-window, leaving exactly the valid windows
    assert abs(ssim(a, b) - ref) < 1e-10


def test_ssim_asymmetric_by_data_range():
    a = np.linspace(0, 1, 64).reshape(8, 8)
    b = 0.5 * a[::-1]
    assert not np.isclose(ssim(a, b), ssim(b, a))


def test_ssim_too_small():
    with pytest.raises(ValueError):
        ssim(np.ones((6, 6)), np.ones((6, 6)))


def test_lowest_fraction_mean():
    vals = np.arange(1.0, 21.0)
    assert lowest_fraction_mean(vals, 0.05) == 1.0
    assert lowest_fraction_mean(vals, 0.10) == 1.5
    assert lowest_fraction_mean([3.0], 0.05) == 3.0

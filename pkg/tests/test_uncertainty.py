import numpy as np
import pytest

from adaptcs.masks import empty_mask, lowfreq_mask, sorted_mask
from adaptcs.samplers import SamplerSpec, analytic_posterior_variance, gaussian_spectral_sample
from adaptcs.transforms import SamplingMask, apply_mask, dft2_unitary, full_mask
from adaptcs.uncertainty import (
    DegenerateUncertaintyError,
    dft_matrix,
    estimate_unacquired_mse,
    kspace_sample_variance,
    normalize_uncertainty,
    noncommutation_analytic,
    theorem_s1_check,
)
from adaptcs.verify import estimator_consistency


def test_identical_samples_zero_variance(rng):
    x = rng.random((6, 6))
    assert not kspace_sample_variance([x, x, x]).any()


def test_two_point_variance():
    a = np.zeros((4, 4))
    b = np.zeros((4, 4))
    b[1, 2] = 1.0
    # the image delta spreads over every coefficient with |d| = 1/4
    v = kspace_sample_variance([a, b])
    np.testing.assert_allclose(v, (0.25**2) / 2)
    # a difference confined to one coefficient
    kd = np.zeros((4, 4), complex)
    kd[2, 2] = 0.8  # DC: real image offset
    c = np.fft.ifft2(np.fft.ifftshift(kd), norm="ortho").real
    v = kspace_sample_variance([a, c])
    expected = np.zeros((4, 4))
    expected[2, 2] = 0.8**2 / 2
    np.testing.assert_allclose(v, expected, atol=1e-15)


def test_variance_needs_two_samples(rng):
    with pytest.raises(ValueError):
        kspace_sample_variance([rng.random((4, 4))])


def test_normalize_examples():
    v = np.zeros((2, 3))
    v[0, 0], v[0, 1] = 3, 4
    u = normalize_uncertainty(v)
    np.testing.assert_allclose(u[0, :2], [0.6, 0.8])
    np.testing.assert_allclose(normalize_uncertainty(u), u, atol=1e-15)
    np.testing.assert_allclose(normalize_uncertainty(v * 123.4), u, atol=1e-15)


def test_normalize_degenerate():
    with pytest.raises(DegenerateUncertaintyError):
        normalize_uncertainty(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        normalize_uncertainty(-np.ones((3, 3)))


def test_unacquired_mse_edges(rng):
    v = rng.random((5, 5))
    assert estimate_unacquired_mse(v, full_mask((5, 5))) == 0
    assert np.isclose(estimate_unacquired_mse(v, empty_mask((5, 5))), v.sum())
    m = SamplingMask((5, 5), "point2d", [0, 7])
    assert np.isclose(estimate_unacquired_mse(v, m), v.sum() - v.flat[0] - v.flat[7])


def test_estimate_matches_analytic_gaussian():
    spec = SamplerSpec("gaussian_spectral", seed=3)
    m0 = lowfreq_mask((16, 16), "point2d", 4)
    lf_k = apply_mask(dft2_unitary(np.random.default_rng(0).random((16, 16))), m0)
    v_hat = kspace_sample_variance(gaussian_spectral_sample(lf_k, m0, spec, 4096))
    oracle = analytic_posterior_variance(m0, spec)
    m = sorted_mask(v_hat, m0, 64)
    est, exact = estimate_unacquired_mse(v_hat, m), estimate_unacquired_mse(oracle, m)
    assert abs(est - exact) / exact < 0.05


def test_estimator_consistency_report():
    r = estimator_consistency()
    assert r["passed"], r


def test_dft_matrix_unitary():
    F = dft_matrix(6)
    np.testing.assert_allclose(F.conj().T @ F, np.eye(6), atol=1e-12)


def test_noncommutation_values():
    r = noncommutation_analytic(4)
    assert np.isclose(r.lhs, 1.0) and abs(r.rhs) < 1e-12 and r.distinct
    mc = theorem_s1_check(4, 100_000, seed=0)
    assert abs(mc.lhs - 1) < 0.05 and abs(mc.rhs) < 0.05 and mc.distinct


def test_noncommutation_length_one():
    r = theorem_s1_check(1, 10, seed=0)
    assert r.lhs == r.rhs and not r.distinct

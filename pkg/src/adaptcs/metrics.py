"""PSNR and SSIM with the fastMRI conventions.

The data range (MAX) is the maximum of the reference image, so neither
metric is symmetric in its arguments.
"""

from __future__ import annotations

import math

import numpy as np

WINDOW = 7
K1, K2 = 0.01, 0.03


def _pair(reference, test):
    ref = np.asarray(reference, dtype=np.float64)
    out = np.asarray(test, dtype=np.float64)
    if ref.shape != out.shape:
        raise ValueError(f"shape mismatch: {ref.shape} vs {out.shape}")
    return ref, out


def psnr(reference: np.ndarray, test: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB; ``inf`` for identical images."""
    ref, out = _pair(reference, test)
    peak = float(ref.max())
    if peak <= 0:
        raise ValueError("reference image has no positive pixel (MAX = 0)")
    mse = float(np.mean((ref - out) ** 2))
    if mse == 0:
        return math.inf
    return 20 * math.log10(peak) - 10 * math.log10(mse)


def _window_sums(x: np.ndarray, n: int) -> np.ndarray:
    c = np.zeros((x.shape[0] + 1, x.shape[1] + 1))
    c[1:, 1:] = x.cumsum(0).cumsum(1)
    return c[n:, n:] - c[:-n, n:] - c[n:, :-n] + c[:-n, :-n]


def ssim_map(reference: np.ndarray, test: np.ndarray) -> np.ndarray:
    """SSIM of every valid 7x7 window (no padding)."""
    ref, out = _pair(reference, test)
    if min(ref.shape) < WINDOW:
        raise ValueError(f"image {ref.shape} smaller than the {WINDOW}x{WINDOW} window")
    peak = float(ref.max())
    c1 = (K1 * peak) ** 2
    c2 = (K2 * peak) ** 2
    n = WINDOW * WINDOW
    # center both images first; keeps the running sums well conditioned
    shift = 0.5 * (ref.mean() + out.mean())
    a, b = ref - shift, out - shift
    sa, sb = _window_sums(a, WINDOW), _window_sums(b, WINDOW)
    saa, sbb, sab = (_window_sums(p, WINDOW) for p in (a * a, b * b, a * b))
    mu_a, mu_b = sa / n, sb / n
    # sample (n - 1) covariance, as in the fastMRI evaluation
    var_a = np.maximum(saa - sa * mu_a, 0.0) / (n - 1)
    var_b = np.maximum(sbb - sb * mu_b, 0.0) / (n - 1)
    cov = (sab - sa * mu_b) / (n - 1)
    mu_a += shift
    mu_b += shift
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2)
    return num / den


def ssim(reference: np.ndarray, test: np.ndarray) -> float:
    return float(ssim_map(reference, test).mean())


def ssim_loss(reference: np.ndarray, test: np.ndarray) -> float:
    """The training and selection loss used throughout: ``1 - SSIM``."""
    return 1.0 - ssim(reference, test)


def lowest_fraction_mean(values, fraction: float) -> float:
    """Mean of the lowest ``fraction`` of values (at least one value)."""
    vals = np.sort(np.asarray(values, dtype=np.float64))
    if vals.size == 0:
        raise ValueError("no values")
    count = max(1, int(math.ceil(fraction * vals.size - 1e-9)))
    return float(vals[:count].mean())

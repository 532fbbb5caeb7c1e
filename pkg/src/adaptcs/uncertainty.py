"""High-frequency uncertainty from sample ensembles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .samplers import SampleEnsemble
from .transforms import SamplingMask, dft2_unitary


class DegenerateUncertaintyError(ValueError):
    """The variance map is identically zero and cannot be normalized."""


def kspace_sample_variance(ens: SampleEnsemble | list | np.ndarray) -> np.ndarray:
    """Unbiased per-coefficient variance ``E|k' - mean|^2`` of the ensemble's spectra."""
    samples = ens.samples if isinstance(ens, SampleEnsemble) else ens
    if len(samples) < 2:
        raise ValueError("need at least two samples for a sample variance")
    spectra = np.stack([dft2_unitary(x) for x in samples])
    # offsets from the first sample make identical spectra give exact zeros
    d = spectra - spectra[0]
    dev = d - d.mean(axis=0)
    return (dev.real**2 + dev.imag**2).sum(axis=0) / (len(samples) - 1)


def normalize_uncertainty(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if np.any(v < 0) or not np.all(np.isfinite(v)):
        raise ValueError("uncertainty map must be finite and nonnegative")
    norm = np.linalg.norm(v)
    if norm == 0:
        raise DegenerateUncertaintyError(
            "uncertainty map is identically zero (degenerate ensemble, e.g. temperature 0)"
        )
    return v / norm


def estimate_unacquired_mse(v: np.ndarray, m: SamplingMask) -> float:
    """Summed variance over the cells ``m`` leaves unacquired.

    Estimates the expected squared k-space error of a reconstruction that
    cannot see those cells.  It is an upper-bound surrogate for the true MSE
    when errors on acquired cells are small compared to unacquired ones.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.shape != m.shape:
        raise ValueError(f"shape mismatch: map {v.shape} vs mask {m.shape}")
    return float(v[~m.dense()].sum())


@dataclass(frozen=True)
class NonCommutationReport:
    lhs: float
    rhs: float
    distinct: bool


def dft_matrix(length: int) -> np.ndarray:
    j = np.arange(length)
    return np.exp(-2j * np.pi * np.outer(j, j) / length) / np.sqrt(length)


def noncommutation_analytic(length: int, index: int = 1) -> NonCommutationReport:
    """Exact values for i.i.d. unit-variance pixels.

    ``lhs`` is the variance of one inverse-DFT coefficient, ``rhs`` is that
    coefficient of the inverse DFT applied to the pixel variances.
    """
    if length <= 1:
        return NonCommutationReport(1.0, 1.0, False)
    f = dft_matrix(length)
    lhs = float(np.real((f.conj().T @ f)[index, index]))
    rhs = complex(f[:, index].conj() @ np.ones(length))
    return NonCommutationReport(lhs, abs(rhs), not np.isclose(lhs, abs(rhs)))


def theorem_s1_check(length: int, trials: int, seed: int, tol: float = 0.05) -> NonCommutationReport:
    """Monte-Carlo version of :func:`noncommutation_analytic`."""
    if length <= 1:
        return NonCommutationReport(1.0, 1.0, False)
    if trials < 2:
        raise ValueError("need at least two trials")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((trials, length))
    f = dft_matrix(length)
    index = 1
    y = x @ f.conj()[:, index]  # (F^H x)_index for each trial
    dev = y - y.mean()
    lhs = float(np.sum(dev.real**2 + dev.imag**2) / (trials - 1))
    pixel_var = x.var(axis=0, ddof=1)
    rhs = abs(complex(f[:, index].conj() @ pixel_var))
    return NonCommutationReport(lhs, rhs, abs(lhs - rhs) > tol)

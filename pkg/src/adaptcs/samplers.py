"""Posterior samplers: draw plausible full-resolution images given LF k-space.

Two stand-ins for a trained super-resolution generator.  ``gaussian_spectral``
has a closed-form posterior and serves as an oracle; ``jitter_ensemble`` is a
heuristic that produces image-dependent high-frequency spread.

Both return real images whose k-space agrees with the conditioning data on
the initial mask.  Frequencies mirrored from acquired ones are determined by
conjugate symmetry and are filled in as well.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from typing import Literal

import numpy as np
from scipy import ndimage

from .transforms import (
    SamplingMask,
    dft2_unitary,
    hermitian_complete,
    idft2_complex,
    mirror_index,
    radial_frequency,
)

Variant = Literal["gaussian_spectral", "jitter_ensemble"]

LOCAL_WINDOW = 7


@dataclass(frozen=True)
class SamplerSpec:
    variant: Variant = "jitter_ensemble"
    alpha: float = 1.0
    amplitude: float = 1.0
    temperature: float = 1.0
    seed: int = 0
    # correlation length (pixels) of the jitter field; jitter_ensemble only
    smoothing: float = 4.0

    def __post_init__(self):
        if self.variant not in ("gaussian_spectral", "jitter_ensemble"):
            raise ValueError(f"unknown sampler variant {self.variant!r}")
        if not self.alpha > 0 or not self.amplitude > 0:
            raise ValueError("alpha and amplitude must be positive")
        if not self.temperature >= 0:
            raise ValueError("temperature must be nonnegative")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SamplerSpec":
        return cls(**data)

    def with_seed(self, seed: int) -> "SamplerSpec":
        return replace(self, seed=int(seed))


@dataclass
class SampleEnsemble:
    samples: list[np.ndarray]
    source_mask: SamplingMask
    sampler: SamplerSpec

    def __len__(self):
        return len(self.samples)

    def stack(self) -> np.ndarray:
        return np.stack(self.samples)


def derive_seed(seed: int, *keys: int) -> int:
    """Independent 64-bit child seed for ``(seed, *keys)``."""
    ss = np.random.SeedSequence([int(seed), *(int(k) for k in keys)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _rng(seed: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), *(int(k) for k in keys)]))


def _prepare(lf_k, m0: SamplingMask, count: int):
    lf_k = np.asarray(lf_k, dtype=np.complex128)
    if tuple(lf_k.shape) != m0.shape:
        raise ValueError(f"shape mismatch: k-space {lf_k.shape} vs mask {m0.shape}")
    if count < 1:
        raise ValueError("sample count must be at least 1")
    return hermitian_complete(lf_k, m0)


def prior_variance(shape: tuple[int, int], spec: SamplerSpec) -> np.ndarray:
    f = radial_frequency(shape)
    return spec.temperature**2 * spec.amplitude / (1.0 + f) ** (2.0 * spec.alpha)


def analytic_posterior_variance(m0: SamplingMask, spec: SamplerSpec) -> np.ndarray:
    """Exact per-coefficient variance of :func:`gaussian_spectral_sample`.

    Zero on the acquired cells and on their conjugate mirrors.
    """
    if spec.variant != "gaussian_spectral":
        raise ValueError("no closed-form posterior variance for " + spec.variant)
    acq = m0.dense()
    known = acq | acq.ravel()[mirror_index(m0.shape)].reshape(m0.shape)
    return np.where(known, 0.0, prior_variance(m0.shape, spec))


def _hermitian_noise(rng: np.random.Generator, shape, var: np.ndarray) -> np.ndarray:
    """Circular complex Gaussian field with ``E|z_f|^2 = var_f`` and ``z(-f) = conj z(f)``."""
    n = shape[0] * shape[1]
    mi = mirror_index(shape)
    draw = rng.standard_normal((2, n))
    flat_var = var.ravel()
    z = np.sqrt(flat_var / 2) * (draw[0] + 1j * draw[1])
    own = np.arange(n)
    lead = own < mi
    z[mi[lead]] = np.conj(z[lead])
    selfconj = own == mi
    z[selfconj] = np.sqrt(flat_var[selfconj]) * draw[0, selfconj]
    return z.reshape(shape)


def gaussian_spectral_sample(
    lf_k: np.ndarray, m0: SamplingMask, spec: SamplerSpec, count: int
) -> SampleEnsemble:
    if spec.variant != "gaussian_spectral":
        raise ValueError("spec is not a gaussian_spectral sampler")
    known_k, known = _prepare(lf_k, m0, count)
    var = np.where(known, 0.0, prior_variance(m0.shape, spec))
    samples = []
    for s in range(count):
        k = known_k.copy()
        if spec.temperature > 0:
            k = k + np.where(known, 0, _hermitian_noise(_rng(spec.seed, s), m0.shape, var))
        samples.append(idft2_complex(k).real)
    return SampleEnsemble(samples, m0, spec)


def local_rms(img: np.ndarray, size: int = LOCAL_WINDOW) -> np.ndarray:
    return np.sqrt(np.maximum(ndimage.uniform_filter(img * img, size, mode="reflect"), 0.0))


def jitter_template(base: np.ndarray) -> np.ndarray:
    """Edge-sharpened detail of the LF image, scaled by local contrast.

    The sign nonlinearity turns smooth LF oscillations into square waves, so
    the harmonics it creates lie along the same frequency directions as the
    structure already visible at low resolution.
    """
    detail = base - ndimage.uniform_filter(base, LOCAL_WINDOW, mode="reflect")
    return local_rms(detail) * np.sign(detail)


def jitter_ensemble_sample(
    lf_k: np.ndarray, m0: SamplingMask, spec: SamplerSpec, count: int
) -> SampleEnsemble:
    if spec.variant != "jitter_ensemble":
        raise ValueError("spec is not a jitter_ensemble sampler")
    known_k, known = _prepare(lf_k, m0, count)
    base = idft2_complex(known_k).real
    template = jitter_template(base)
    samples = []
    for s in range(count):
        if spec.temperature == 0:
            samples.append(base.copy())
            continue
        rng = _rng(spec.seed, s)
        field = ndimage.gaussian_filter(rng.standard_normal(m0.shape), spec.smoothing, mode="wrap")
        field /= field.std() or 1.0
        noise_k = dft2_unitary(spec.temperature * np.sqrt(spec.amplitude) * template * field)
        k = np.where(known, known_k, noise_k)
        samples.append(idft2_complex(k).real)
    return SampleEnsemble(samples, m0, spec)


def draw_samples(lf_k, m0: SamplingMask, spec: SamplerSpec, count: int) -> SampleEnsemble:
    if spec.variant == "gaussian_spectral":
        return gaussian_spectral_sample(lf_k, m0, spec, count)
    return jitter_ensemble_sample(lf_k, m0, spec, count)

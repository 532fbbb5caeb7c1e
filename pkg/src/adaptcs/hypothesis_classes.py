"""Exact empirical-risk infima of three sampling-reconstruction model classes.

On a toy problem every quantity is enumerable, so the infima can be
compared directly:

* ``h1``   one mask and one reconstructor shared by every input;
* ``h2``   a per-input mask (at most ``J`` distinct masks) with one shared reconstructor;
* ``h15``  a per-input choice among ``J`` (mask, reconstructor) pairs.

Signals are 1-D complex spectra of length ``L``; a toy reconstructor
``theta`` is a fill vector used in place of unacquired coefficients.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

MAX_ENUMERATION = 10**7


def unitary_dft_1d(x: np.ndarray) -> np.ndarray:
    return np.fft.fft(x, norm="ortho")


def toy_reconstruct(k: np.ndarray, mask: np.ndarray, theta: np.ndarray) -> np.ndarray:
    filled = np.where(mask, k, theta)
    return np.fft.ifft(filled, norm="ortho").real


def squared_error(ref: np.ndarray, out: np.ndarray) -> float:
    return float(np.mean((ref - out) ** 2))


def global_ssim_loss(ref: np.ndarray, out: np.ndarray) -> float:
    """``1 - SSIM`` with a single window covering the whole signal."""
    peak = float(np.max(ref)) or 1.0
    c1, c2 = (0.01 * peak) ** 2, (0.03 * peak) ** 2
    mu_a, mu_b = ref.mean(), out.mean()
    cov = np.cov(ref, out, ddof=1) if ref.size > 1 else np.zeros((2, 2))
    num = (2 * mu_a * mu_b + c1) * (2 * cov[0, 1] + c2)
    den = (mu_a**2 + mu_b**2 + c1) * (cov[0, 0] + cov[1, 1] + c2)
    return float(1.0 - num / den)


LOSSES: dict[str, Callable[[np.ndarray, np.ndarray], float]] = {
    "squared_error": squared_error,
    "ssim": global_ssim_loss,
}


@dataclass
class ToyHypothesisInstance:
    kspace: list[np.ndarray]  # fully sampled spectra, length L <= 8
    images: list[np.ndarray]
    mask_space: list[np.ndarray]  # boolean vectors
    theta_space: list[np.ndarray]  # complex fill vectors
    m0: np.ndarray
    J: int
    loss: str = "squared_error"

    def validate(self) -> None:
        n = len(self.kspace)
        if not 1 <= n <= 8 or len(self.images) != n:
            raise ValueError("toy dataset must hold 1..8 (k, I) pairs")
        length = self.kspace[0].size
        if length > 8:
            raise ValueError("toy signals are limited to L <= 8")
        if self.J < 1 or not self.mask_space or not self.theta_space:
            raise ValueError("need J >= 1 and nonempty mask and theta spaces")
        sigs = {np.round(np.where(self.m0, k, 0), 12).tobytes() for k in self.kspace}
        if len(sigs) != n:
            raise ValueError("low-frequency signatures must be distinct across data points")
        if self.loss not in LOSSES:
            raise ValueError(f"unknown loss {self.loss!r}")

    def loss_table(self) -> np.ndarray:
        """``table[i, m, t]``: loss of data point ``i`` under mask ``m`` and theta ``t``."""
        fn = LOSSES[self.loss]
        table = np.empty((len(self.kspace), len(self.mask_space), len(self.theta_space)))
        for i, (k, img) in enumerate(zip(self.kspace, self.images)):
            for a, mask in enumerate(self.mask_space):
                for b, theta in enumerate(self.theta_space):
                    table[i, a, b] = fn(img, toy_reconstruct(k, mask, theta))
        return table


@dataclass
class RiskComparison:
    inf_h1: float
    inf_h2: float
    inf_h15: float
    table: np.ndarray = field(repr=False)


def _best_subset_risk(columns: np.ndarray, J: int) -> float:
    """min over column subsets of size <= J of mean_i min_{c in subset} columns[i, c]."""
    best = math.inf
    n_cols = columns.shape[1]
    for size in range(1, min(J, n_cols) + 1):
        for subset in itertools.combinations(range(n_cols), size):
            best = min(best, float(columns[:, list(subset)].min(axis=1).mean()))
    return best


def enumeration_size(inst: ToyHypothesisInstance) -> int:
    pairs = len(inst.mask_space) * len(inst.theta_space)
    subsets = sum(math.comb(pairs, s) for s in range(1, min(inst.J, pairs) + 1))
    return subsets * len(inst.kspace)


def hypothesis_risk_compare(inst: ToyHypothesisInstance) -> RiskComparison:
    inst.validate()
    if enumeration_size(inst) > MAX_ENUMERATION:
        raise ValueError("instance too large for exhaustive enumeration")
    table = inst.loss_table()
    n, n_m, n_t = table.shape
    inf_h1 = float(table.mean(axis=0).min())
    # distinct LF signatures: any assignment of points to masks is realizable
    inf_h2 = min(_best_subset_risk(table[:, :, t], inst.J) for t in range(n_t))
    inf_h15 = _best_subset_risk(table.reshape(n, n_m * n_t), inst.J)
    return RiskComparison(inf_h1, inf_h2, inf_h15, table)


def random_instance(
    rng: np.random.Generator,
    length: int = 4,
    n_masks: int = 4,
    n_theta: int = 3,
    n_data: int = 4,
    J: int = 2,
    loss: str = "squared_error",
) -> ToyHypothesisInstance:
    m0 = np.zeros(length, dtype=bool)
    m0[0] = True
    images = [rng.uniform(0, 1, length) for _ in range(n_data)]
    kspace = [unitary_dft_1d(x) for x in images]
    masks = []
    for _ in range(n_masks):
        m = m0 | (rng.random(length) < 0.5)
        masks.append(m)
    thetas = [rng.normal(0, 0.5, length) + 1j * rng.normal(0, 0.5, length) for _ in range(n_theta)]
    return ToyHypothesisInstance(kspace, images, masks, thetas, m0, J, loss)

"""Reconstructors ``h(k; M, theta)``: zero-filling and l1-Haar FISTA.

FISTA solves

    min_x  lam * ||detail(W x)||_1 + 0.5 * ||M F x - y||^2

over real images ``x``, with ``W`` an orthonormal Haar transform.  The
coarsest approximation band is left unpenalized.  Because ``F`` is unitary
the data term has a 1-Lipschitz gradient and a unit step is used.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Literal, Sequence

import numpy as np

from .metrics import ssim_loss
from .transforms import (
    SamplingMask,
    check_consistent,
    dft2_unitary,
    idft2_complex,
    zero_fill_recon,
)

DEFAULT_LAMBDA_GRID = tuple(float(v) for v in np.geomspace(1e-4, 1e-1, 13))

_S2 = np.sqrt(0.5)


@dataclass(frozen=True)
class ReconParams:
    variant: Literal["zero_fill", "fista"] = "zero_fill"
    lam: float = 0.0
    iters: int = 100
    wavelet_levels: int = 3

    def __post_init__(self):
        if self.variant not in ("zero_fill", "fista"):
            raise ValueError(f"unknown reconstructor {self.variant!r}")
        if not np.isfinite(self.lam) or self.lam < 0:
            raise ValueError("lambda must be finite and nonnegative")
        if self.iters < 1 or self.wavelet_levels < 1:
            raise ValueError("iters and wavelet_levels must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ReconParams":
        data = dict(data)
        if "lambda" in data:
            data["lam"] = data.pop("lambda")
        return cls(**data)


def lambda_grid(lams: Sequence[float] = DEFAULT_LAMBDA_GRID, **kwargs) -> list[ReconParams]:
    return [ReconParams("fista", float(v), **kwargs) for v in lams]


def check_levels(shape: tuple[int, int], levels: int) -> None:
    step = 2**levels
    if shape[0] % step or shape[1] % step:
        raise ValueError(f"shape {shape} is not divisible by 2**{levels} for Haar levels")


def haar2(x: np.ndarray, levels: int) -> np.ndarray:
    """Orthonormal 2-D Haar transform in Mallat layout."""
    check_levels(x.shape, levels)
    out = np.array(x, dtype=np.float64)
    h, w = out.shape
    for _ in range(levels):
        blk = out[:h, :w]
        a = (blk[0::2] + blk[1::2]) * _S2
        d = (blk[0::2] - blk[1::2]) * _S2
        blk = np.vstack([a, d])
        a = (blk[:, 0::2] + blk[:, 1::2]) * _S2
        d = (blk[:, 0::2] - blk[:, 1::2]) * _S2
        out[:h, :w] = np.hstack([a, d])
        h //= 2
        w //= 2
    return out


def ihaar2(c: np.ndarray, levels: int) -> np.ndarray:
    check_levels(c.shape, levels)
    out = np.array(c, dtype=np.float64)
    H, W = out.shape
    for lev in range(levels - 1, -1, -1):
        h, w = H >> lev, W >> lev
        blk = out[:h, :w]
        a, d = blk[:, : w // 2], blk[:, w // 2 :]
        tmp = np.empty_like(blk)
        tmp[:, 0::2] = (a + d) * _S2
        tmp[:, 1::2] = (a - d) * _S2
        a, d = tmp[: h // 2], tmp[h // 2 :]
        blk = np.empty_like(tmp)
        blk[0::2] = (a + d) * _S2
        blk[1::2] = (a - d) * _S2
        out[:h, :w] = blk
    return out


def detail_mask(shape: tuple[int, int], levels: int) -> np.ndarray:
    m = np.ones(shape, dtype=bool)
    m[: shape[0] >> levels, : shape[1] >> levels] = False
    return m


def soft_threshold(x: np.ndarray, t: float) -> np.ndarray:
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


@dataclass
class FistaResult:
    image: np.ndarray
    objective: list[float]


def fista_l1_haar(
    masked_k: np.ndarray,
    m: SamplingMask,
    lam: float,
    iters: int = 100,
    levels: int = 3,
) -> FistaResult:
    """Monotone FISTA (Beck and Teboulle) in the Haar domain."""
    acq = m.dense()
    check_levels(acq.shape, levels)
    y = np.asarray(masked_k, dtype=np.complex128)
    pen = detail_mask(acq.shape, levels)

    def image_of(w):
        return ihaar2(w, levels)

    def residual(x):
        return np.where(acq, dft2_unitary(x) - y, 0)

    def objective(w, r):
        return float(lam * np.abs(w[pen]).sum() + 0.5 * np.sum(np.abs(r) ** 2))

    x = idft2_complex(y).real
    w = haar2(x, levels)
    r = residual(x)
    f_w = objective(w, r)
    history = [f_w]
    w_prev = w
    z_pt = w
    t = 1.0
    for _ in range(iters):
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y_pt = w + (t / t_next) * (z_pt - w) + ((t - 1.0) / t_next) * (w - w_prev)
        x_y = image_of(y_pt)
        grad = haar2(idft2_complex(residual(x_y)).real, levels)
        z_pt = y_pt - grad
        if lam > 0:
            z_pt[pen] = soft_threshold(z_pt[pen], lam)
        r_z = residual(image_of(z_pt))
        f_z = objective(z_pt, r_z)
        w_prev = w
        if f_z <= f_w:
            w, f_w = z_pt, f_z
        history.append(f_w)
        t = t_next
    return FistaResult(image_of(w), history)


def reconstruct(masked_k: np.ndarray, m: SamplingMask, theta: ReconParams) -> np.ndarray:
    check_consistent(masked_k, m)
    if theta.variant == "zero_fill":
        return zero_fill_recon(masked_k, m)
    return fista_l1_haar(masked_k, m, theta.lam, theta.iters, theta.wavelet_levels).image


def empirical_risk(
    training_k: Sequence[np.ndarray],
    training_img: Sequence[np.ndarray],
    m: SamplingMask,
    theta: ReconParams,
) -> float:
    dense = m.dense()
    losses = [
        ssim_loss(img, reconstruct(np.where(dense, k, 0), m, theta))
        for k, img in zip(training_k, training_img)
    ]
    return float(np.mean(losses))


def tune_theta(
    training_k: Sequence[np.ndarray],
    training_img: Sequence[np.ndarray],
    m: SamplingMask,
    grid: Sequence[ReconParams],
) -> tuple[ReconParams, float]:
    """Grid search for the parameters with the lowest mean ``1 - SSIM``.

    Ties resolve to the earliest candidate in ``grid``.
    """
    if not grid or not training_k:
        raise ValueError("tune_theta needs a nonempty grid and training set")
    if len(training_k) != len(training_img):
        raise ValueError("training k-space and images differ in length")
    best, best_risk = None, np.inf
    for theta in grid:
        risk = empirical_risk(training_k, training_img, m, theta)
        if risk < best_risk:
            best, best_risk = theta, risk
    return best, float(best_risk)

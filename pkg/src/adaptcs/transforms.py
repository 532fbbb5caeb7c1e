"""Measurement model: centered unitary 2-D DFT, masking and zero-filling.

Images are real ``(H, W)`` float arrays with the pixel origin at ``[0, 0]``.
k-space grids are complex ``(H, W)`` arrays with the DC term at
``[H // 2, W // 2]`` (``fftshift`` layout).  Both transforms use the
orthonormal ``1/sqrt(L)`` scaling so Parseval holds exactly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

MaskKind = Literal["point2d", "line1d"]

IMAG_WARN_LEVEL = 1e-6
CONSISTENCY_TOL = 1e-12


class ImaginaryResidualWarning(UserWarning):
    """Raised when a reconstruction discards a non-negligible imaginary part."""


@dataclass(frozen=True, eq=False)
class SamplingMask:
    """Set of acquired k-space locations.

    ``acquired`` holds flat row-major cell indices for ``point2d`` masks and
    column indices for ``line1d`` masks (a line acquires a whole column).
    """

    shape: tuple[int, int]
    kind: MaskKind
    acquired: np.ndarray = field(repr=False)

    def __post_init__(self):
        h, w = (int(s) for s in self.shape)
        if h < 1 or w < 1:
            raise ValueError(f"mask shape must be positive, got {self.shape}")
        if self.kind not in ("point2d", "line1d"):
            raise ValueError(f"unknown mask kind {self.kind!r}")
        idx = np.unique(np.asarray(self.acquired, dtype=np.int64).ravel())
        limit = h * w if self.kind == "point2d" else w
        if idx.size and (idx[0] < 0 or idx[-1] >= limit):
            raise ValueError(f"mask index out of bounds for {self.kind} {h}x{w}")
        idx.setflags(write=False)
        object.__setattr__(self, "shape", (h, w))
        object.__setattr__(self, "acquired", idx)

    @property
    def size(self) -> int:
        return self.shape[0] * self.shape[1]

    @property
    def budget(self) -> int:
        if self.kind == "line1d":
            return int(self.acquired.size) * self.shape[0]
        return int(self.acquired.size)

    @property
    def acceleration(self) -> float:
        return self.size / self.budget if self.budget else float("inf")

    def dense(self) -> np.ndarray:
        """Boolean ``(H, W)`` array, True where acquired."""
        h, w = self.shape
        out = np.zeros((h, w), dtype=bool)
        if self.kind == "line1d":
            out[:, self.acquired] = True
        else:
            out.ravel()[self.acquired] = True
        return out

    def cells(self) -> np.ndarray:
        """Flat row-major indices of every acquired cell."""
        return np.flatnonzero(self.dense())

    def contains(self, other: "SamplingMask") -> bool:
        return bool(np.all(self.dense()[other.dense()]))

    @classmethod
    def from_dense(cls, dense: np.ndarray, kind: MaskKind = "point2d") -> "SamplingMask":
        dense = np.asarray(dense, dtype=bool)
        if dense.ndim != 2:
            raise ValueError("dense mask must be 2-D")
        if kind == "line1d":
            cols = dense.all(axis=0)
            if not np.array_equal(dense, np.broadcast_to(cols, dense.shape)):
                raise ValueError("dense pattern is not a set of full columns")
            return cls(dense.shape, "line1d", np.flatnonzero(cols))
        return cls(dense.shape, "point2d", np.flatnonzero(dense))

    def __eq__(self, other):
        if not isinstance(other, SamplingMask):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.kind == other.kind
            and np.array_equal(self.acquired, other.acquired)
        )

    def __hash__(self):
        return hash((self.shape, self.kind, self.acquired.tobytes()))


def full_mask(shape: tuple[int, int]) -> SamplingMask:
    h, w = shape
    return SamplingMask((h, w), "point2d", np.arange(h * w))


def dft2_unitary(img: np.ndarray) -> np.ndarray:
    """Centered unitary DFT of a real image."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2 or img.size == 0:
        raise ValueError(f"expected a non-empty 2-D image, got shape {img.shape}")
    return np.fft.fftshift(np.fft.fft2(img, norm="ortho"))


def idft2_complex(k: np.ndarray) -> np.ndarray:
    """Inverse of :func:`dft2_unitary` keeping the complex result."""
    k = np.asarray(k, dtype=np.complex128)
    return np.fft.ifft2(np.fft.ifftshift(k), norm="ortho")


def idft2_unitary(k: np.ndarray) -> tuple[np.ndarray, float]:
    """Inverse transform; returns ``(real image, max |imag| residual)``."""
    z = idft2_complex(k)
    residual = float(np.max(np.abs(z.imag))) if z.size else 0.0
    return z.real.copy(), residual


def mirror_index(shape: tuple[int, int]) -> np.ndarray:
    """Flat index of the frequency ``-f`` for every centered cell ``f``."""
    h, w = shape
    rows = (2 * (h // 2) - np.arange(h)) % h
    cols = (2 * (w // 2) - np.arange(w)) % w
    return (rows[:, None] * w + cols[None, :]).ravel()


def mirror(arr: np.ndarray) -> np.ndarray:
    """``out[f] = arr[-f]`` on a centered grid."""
    return arr.ravel()[mirror_index(arr.shape)].reshape(arr.shape)


def is_conjugate_symmetric(k: np.ndarray, atol: float = 1e-9) -> bool:
    return bool(np.allclose(k, np.conj(mirror(k)), rtol=0.0, atol=atol))


def radial_frequency(shape: tuple[int, int]) -> np.ndarray:
    """Radial frequency in cycles/sample for every centered cell.

    Axis Nyquist is 0.5, the corner reaches ``sqrt(0.5)`` on even grids.
    """
    h, w = shape
    fy = (np.arange(h) - h // 2) / h
    fx = (np.arange(w) - w // 2) / w
    return np.hypot(fy[:, None], fx[None, :])


def _check_shape(k: np.ndarray, m: SamplingMask) -> None:
    if tuple(k.shape) != m.shape:
        raise ValueError(f"shape mismatch: k-space {tuple(k.shape)} vs mask {m.shape}")


def apply_mask(k: np.ndarray, m: SamplingMask) -> np.ndarray:
    k = np.asarray(k)
    _check_shape(k, m)
    return np.where(m.dense(), k, 0).astype(np.complex128)


def check_consistent(masked_k: np.ndarray, m: SamplingMask, tol: float = CONSISTENCY_TOL) -> None:
    _check_shape(masked_k, m)
    outside = np.abs(np.asarray(masked_k)[~m.dense()])
    if outside.size and outside.max() > tol:
        raise ValueError(
            f"k-space has energy at unacquired locations (max |k| = {outside.max():.3g})"
        )


def zero_fill_recon(
    masked_k: np.ndarray, m: SamplingMask, complex_output: bool = False
) -> np.ndarray:
    """Inverse DFT of the masked data.

    With ``complex_output`` the complex estimate is returned and its MSE
    against the truth is exactly ``sum(|k_l|^2 for l not in m) / L``.  The
    default real output can only be closer to a real ground truth.
    """
    check_consistent(masked_k, m)
    if complex_output:
        return idft2_complex(masked_k)
    img, residual = idft2_unitary(masked_k)
    if residual > IMAG_WARN_LEVEL:
        warnings.warn(
            f"zero-fill discarded imaginary residual {residual:.3g}",
            ImaginaryResidualWarning,
            stacklevel=2,
        )
    return img


def hermitian_complete(masked_k: np.ndarray, m: SamplingMask) -> tuple[np.ndarray, np.ndarray]:
    """Fill the mirror of every acquired cell using conjugate symmetry.

    Returns ``(k, known)`` where ``known`` is the boolean closure of the
    mask under ``f -> -f``.  Valid for data from real images.
    """
    check_consistent(masked_k, m)
    acq = m.dense()
    known = acq | mirror(acq)
    k = np.where(acq, masked_k, np.conj(mirror(np.asarray(masked_k, dtype=np.complex128))))
    return np.where(known, k, 0), known

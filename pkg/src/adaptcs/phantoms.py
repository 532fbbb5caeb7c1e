"""Synthetic image populations and spectral band measurements."""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .io import write_pgm
from .recon import ihaar2
from .samplers import derive_seed

KINDS = ("stripes_h", "stripes_v", "haar_sparse", "smooth_blobs", "mixed", "stripes_hv")
# composite kinds cycle through their members by item index
CYCLES = {
    "mixed": ("stripes_h", "stripes_v", "smooth_blobs"),
    "stripes_hv": ("stripes_h", "stripes_v"),
}


def _normalize(img: np.ndarray) -> np.ndarray:
    lo, hi = img.min(), img.max()
    if hi - lo <= 0:
        return np.zeros_like(img)
    return (img - lo) / (hi - lo)


def _disk(shape, rng, radius_range) -> np.ndarray:
    h, w = shape
    cy, cx = rng.uniform(0.25 * h, 0.75 * h), rng.uniform(0.25 * w, 0.75 * w)
    r = rng.uniform(*radius_range) * min(h, w)
    yy, xx = np.mgrid[:h, :w]
    # soft edge, about one pixel wide
    return 1.0 / (1.0 + np.exp(np.hypot(yy - cy, xx - cx) - r))


def stripes(shape, rng, axis: int) -> np.ndarray:
    """Square-wave stripes varying along ``axis`` (0: horizontal stripes) over a soft disk."""
    h, w = shape
    n = shape[axis]
    period = rng.uniform(0.2, 0.35) * n
    phase = rng.uniform(0, period)
    coord = np.arange(n)
    wave = (np.mod(coord + phase, period) < period / 2).astype(float)
    wave = wave[:, None] if axis == 0 else wave[None, :]
    img = 0.2 + 0.5 * np.broadcast_to(wave, (h, w)) + 0.3 * _disk(shape, rng, (0.12, 0.22))
    return _normalize(img)


def smooth_blobs(shape, rng, count: int | None = None) -> np.ndarray:
    h, w = shape
    count = count or int(rng.integers(3, 6))
    yy, xx = np.mgrid[:h, :w]
    img = np.zeros(shape)
    for _ in range(count):
        cy, cx = rng.uniform(0, h), rng.uniform(0, w)
        sigma = rng.uniform(0.06, 0.15) * min(h, w)
        img += rng.uniform(0.4, 1.0) * np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * sigma**2))
    return _normalize(img)


def haar_sparse(shape, rng, nonzeros: int = 32) -> np.ndarray:
    """Image with exactly ``nonzeros`` nonzero coefficients in the full-depth Haar basis.

    The DC coefficient is one of them; it absorbs the offset that moves the
    image into [0, 1], and the final scaling keeps the support unchanged.
    """
    levels = int(np.log2(min(shape)))
    c = np.zeros(shape)
    picks = rng.choice(np.arange(1, c.size), size=nonzeros - 1, replace=False)
    c.ravel()[picks] = rng.uniform(0.5, 2.0, nonzeros - 1) * rng.choice([-1.0, 1.0], nonzeros - 1)
    img = ihaar2(c, levels)
    dc_atom = ihaar2(np.eye(1, c.size).reshape(shape), levels)[0, 0]
    c.flat[0] = -img.min() / dc_atom
    img = ihaar2(c, levels)
    return img / img.max()


def make_phantom(kind: str, shape, seed: int, index: int = 0) -> np.ndarray:
    rng = np.random.default_rng(derive_seed(seed, index))
    kind = phantom_kind(kind, index)
    if kind == "stripes_h":
        return stripes(shape, rng, axis=0)
    if kind == "stripes_v":
        return stripes(shape, rng, axis=1)
    if kind == "smooth_blobs":
        return smooth_blobs(shape, rng)
    if kind == "haar_sparse":
        return haar_sparse(shape, rng)
    raise ValueError(f"unknown phantom kind {kind!r}; expected one of {KINDS}")


def phantom_kind(kind: str, index: int) -> str:
    cycle = CYCLES.get(kind)
    return cycle[index % len(cycle)] if cycle else kind


def generate_phantoms(kind: str, count: int, shape, seed: int, out_dir) -> Path:
    """Write ``count`` 16-bit PGM phantoms plus ``manifest.json`` to ``out_dir``."""
    if count < 1:
        raise ValueError("count must be at least 1")
    if kind not in KINDS:
        raise ValueError(f"unknown phantom kind {kind!r}; expected one of {KINDS}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise PermissionError(f"directory {out} is not writable")
    width = max(3, len(str(count - 1)))
    files = []
    for i in range(count):
        name = f"{phantom_kind(kind, i)}_{i:0{width}d}.pgm"
        write_pgm(out / name, make_phantom(kind, shape, seed, i))
        files.append({"file": name, "kind": phantom_kind(kind, i)})
    manifest = {"kind": kind, "count": count, "shape": list(shape), "seed": seed, "files": files}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return out


def axis_bands(shape, halfwidth: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Boolean bands around the vertical (kx ~ 0) and horizontal (ky ~ 0) frequency axes.

    The shared central square is excluded from both.
    """
    h, w = shape
    hw = halfwidth if halfwidth is not None else max(1, min(h, w) // 16)
    ky = np.abs(np.arange(h) - h // 2)[:, None]
    kx = np.abs(np.arange(w) - w // 2)[None, :]
    vertical = (kx <= hw) & (ky > hw)
    horizontal = (ky <= hw) & (kx > hw)
    return vertical, horizontal


def band_energy_ratio(power: np.ndarray, halfwidth: int | None = None) -> float:
    """Energy on the vertical-frequency band over energy on the horizontal band."""
    vert, horiz = axis_bands(power.shape, halfwidth)
    e_h = float(power[horiz].sum())
    e_v = float(power[vert].sum())
    return e_v / e_h if e_h > 0 else np.inf

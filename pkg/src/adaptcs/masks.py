"""Sampling-mask constructors.

All constructors return masks that contain the initial mask ``m0`` and hit
the requested budget exactly.  For ``line1d`` masks the budget counts cells,
so it must be a multiple of the image height, and 2-D weights are collapsed
to per-column sums.  Ties are broken by ascending index everywhere.
"""

from __future__ import annotations

import numpy as np

from .transforms import MaskKind, SamplingMask


def budget_for(shape: tuple[int, int], accel: float, kind: MaskKind = "point2d") -> int:
    """Cell budget for an acceleration rate; whole lines for ``line1d``."""
    h, w = shape
    if kind == "line1d":
        return int(round(w / accel)) * h
    return int(round(h * w / accel))


def lowfreq_mask(shape: tuple[int, int], kind: MaskKind, lf_extent: int) -> SamplingMask:
    """Centered ``lf_extent`` square (point2d) or ``lf_extent`` center columns (line1d)."""
    h, w = shape
    if kind == "point2d":
        if not 0 <= lf_extent <= min(h, w):
            raise ValueError(f"lf_extent {lf_extent} out of range for {h}x{w}")
        r0 = h // 2 - lf_extent // 2
        c0 = w // 2 - lf_extent // 2
        rows = np.arange(r0, r0 + lf_extent)
        cols = np.arange(c0, c0 + lf_extent)
        return SamplingMask((h, w), "point2d", (rows[:, None] * w + cols[None, :]).ravel())
    if kind == "line1d":
        if not 0 <= lf_extent <= w:
            raise ValueError(f"lf_extent {lf_extent} out of range for width {w}")
        c0 = w // 2 - lf_extent // 2
        return SamplingMask((h, w), "line1d", np.arange(c0, c0 + lf_extent))
    raise ValueError(f"unknown mask kind {kind!r}")


def empty_mask(shape: tuple[int, int], kind: MaskKind = "point2d") -> SamplingMask:
    return SamplingMask(tuple(shape), kind, np.empty(0, dtype=np.int64))


def _units(weights: np.ndarray, m0: SamplingMask, total_budget: int):
    """Candidate unit weights and the number of units still to pick."""
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != m0.shape:
        raise ValueError(f"shape mismatch: weights {weights.shape} vs mask {m0.shape}")
    h, w = m0.shape
    if total_budget > h * w:
        raise ValueError(f"budget {total_budget} exceeds grid size {h * w}")
    if total_budget < m0.budget:
        raise ValueError(f"budget {total_budget} smaller than initial mask budget {m0.budget}")
    if m0.kind == "line1d":
        if total_budget % h:
            raise ValueError(f"line1d budget {total_budget} is not a multiple of height {h}")
        unit_w = weights.sum(axis=0)
        need = total_budget // h - m0.acquired.size
    else:
        unit_w = weights.ravel()
        need = total_budget - m0.acquired.size
    free = np.ones(unit_w.size, dtype=bool)
    free[m0.acquired] = False
    return unit_w, free, int(need)


def _finish(m0: SamplingMask, picked: np.ndarray) -> SamplingMask:
    return SamplingMask(m0.shape, m0.kind, np.concatenate([m0.acquired, picked]))


def sorted_mask(v: np.ndarray, m0: SamplingMask, total_budget: int) -> SamplingMask:
    """Add the highest-uncertainty locations outside ``m0`` until the budget is met."""
    unit_w, free, need = _units(v, m0, total_budget)
    cand = np.flatnonzero(free)
    # stable sort on the negated weight keeps ascending index among ties
    order = np.argsort(-unit_w[cand], kind="stable")
    return _finish(m0, cand[order[:need]])


def weighted_sample_without_replacement(
    weights: np.ndarray, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Pick ``n`` indices without replacement, inclusion driven by weight.

    Exponential-keys method: key ``log(u) / w`` per item, keep the ``n``
    largest.  Zero-weight items are never drawn.
    """
    weights = np.asarray(weights, dtype=np.float64)
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise ValueError("weights must be finite and nonnegative")
    positive = np.flatnonzero(weights > 0)
    if n > positive.size:
        raise ValueError(
            f"cannot draw {n} items: only {positive.size} locations have positive weight"
        )
    u = rng.random(weights.size)
    keys = np.full(weights.size, -np.inf)
    keys[positive] = np.log(u[positive]) / weights[positive]
    order = np.argsort(-keys, kind="stable")
    return np.sort(order[:n])


def rejection_sample_mask(
    weights: np.ndarray, m0: SamplingMask, total_budget: int, seed: int
) -> SamplingMask:
    """``m0`` plus locations drawn without duplication in proportion to ``weights``."""
    unit_w, free, need = _units(weights, m0, total_budget)
    cand = np.flatnonzero(free)
    if need == cand.size:
        # every remaining location is forced, whatever its weight
        return _finish(m0, cand)
    rng = np.random.default_rng(seed)
    picked = weighted_sample_without_replacement(unit_w[cand], need, rng)
    return _finish(m0, cand[picked])


def vd_weights(shape: tuple[int, int], kind: MaskKind = "point2d", a_f: float = 1.5) -> np.ndarray:
    """Polynomial variable-density map ``(1 - d)^a_f`` with ``d`` the normalized radius.

    For ``line1d`` the distance is measured along the phase-encode (column) axis.
    """
    h, w = shape
    dy = np.abs(np.arange(h) - h // 2).astype(float)
    dx = np.abs(np.arange(w) - w // 2).astype(float)
    if kind == "line1d":
        d = np.broadcast_to(dx / max(dx.max(), 1.0), (h, w))
    else:
        r = np.hypot(dy[:, None], dx[None, :])
        d = r / max(r.max(), 1.0)
    return np.clip(1.0 - d, 0.0, 1.0) ** a_f


def vd_mask(
    shape: tuple[int, int],
    kind: MaskKind,
    m0: SamplingMask,
    total_budget: int,
    a_f: float = 1.5,
    seed: int = 0,
) -> SamplingMask:
    if tuple(shape) != m0.shape or kind != m0.kind:
        raise ValueError("shape/kind disagree with the initial mask")
    return rejection_sample_mask(vd_weights(m0.shape, kind, a_f), m0, total_budget, seed)


def random_mask(
    shape: tuple[int, int], kind: MaskKind, m0: SamplingMask, total_budget: int, seed: int = 0
) -> SamplingMask:
    if tuple(shape) != m0.shape or kind != m0.kind:
        raise ValueError("shape/kind disagree with the initial mask")
    return rejection_sample_mask(np.ones(m0.shape), m0, total_budget, seed)


def equispaced_mask(shape: tuple[int, int], m0: SamplingMask, total_budget: int) -> SamplingMask:
    """ACS lines plus lines at a fixed stride (phase 0) among the remaining columns."""
    if m0.kind != "line1d":
        raise ValueError("equispaced masks are defined for line1d sampling only")
    if tuple(shape) != m0.shape:
        raise ValueError("shape disagrees with the initial mask")
    _, free, need = _units(np.zeros(m0.shape), m0, total_budget)
    cand = np.flatnonzero(free)
    if need == 0:
        return m0
    stride = max(cand.size // need, 1)
    return _finish(m0, cand[::stride][:need])

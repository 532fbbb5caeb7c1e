"""Training and inference for adaptive mask/reconstructor selection.

Training quantifies high-frequency uncertainty for every training item,
clusters the normalized maps, draws one mask per centroid and tunes a
dedicated reconstructor for it.  Inference repeats the uncertainty step on
the low-frequency part of a new input, picks the nearest centroid and
reconstructs with that pair.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .clustering import kmeans_pp
from .io import read_mask, read_umap, write_mask, write_umap
from .masks import rejection_sample_mask, sorted_mask
from .recon import ReconParams, reconstruct, tune_theta
from .samplers import SamplerSpec, derive_seed, draw_samples
from .transforms import SamplingMask, apply_mask, idft2_complex
from .uncertainty import (
    DegenerateUncertaintyError,
    kspace_sample_variance,
    normalize_uncertainty,
)

logger = logging.getLogger(__name__)

# seed stream tags
_UQ, _CLUSTER, _MASK, _INFER = 1, 2, 3, 4


@dataclass
class TrainConfig:
    m0: SamplingMask
    sampler: SamplerSpec
    S: int
    J: int
    total_budget: int
    recon_grid: list[ReconParams] = field(default_factory=lambda: [ReconParams("zero_fill")])
    # "rejection" follows the training algorithm; "sorted" builds the kmeans-sorted ablation
    mask_rule: str = "rejection"


@dataclass
class PairBank:
    masks: list[SamplingMask]
    thetas: list[ReconParams]
    centroids: np.ndarray  # (J, H, W)
    m0: SamplingMask
    sampler: SamplerSpec
    S: int
    total_budget: int
    risks: list[float] = field(default_factory=list)
    fallback: list[bool] = field(default_factory=list)
    assignment: list[int] = field(default_factory=list)

    @property
    def J(self) -> int:
        return len(self.masks)

    def validate(self) -> None:
        if not (len(self.masks) == len(self.thetas) == self.centroids.shape[0] >= 1):
            raise ValueError("bank must hold J >= 1 matching masks, thetas and centroids")
        for j, m in enumerate(self.masks):
            if m.shape != self.m0.shape or m.budget != self.total_budget:
                raise ValueError(f"mask {j} has wrong shape or budget")
            if not m.contains(self.m0):
                raise ValueError(f"mask {j} does not contain the initial mask")

    def save(self, directory) -> Path:
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        write_mask(out / "m0.txt", self.m0)
        entries = []
        for j, (m, theta) in enumerate(zip(self.masks, self.thetas)):
            write_mask(out / f"mask_{j}.txt", m)
            write_umap(out / f"centroid_{j}.umap", self.centroids[j])
            entries.append(
                {
                    "mask": f"mask_{j}.txt",
                    "centroid": f"centroid_{j}.umap",
                    "theta": theta.to_dict(),
                    "risk": self.risks[j] if j < len(self.risks) else None,
                    "tuned_on_full_set": self.fallback[j] if j < len(self.fallback) else False,
                }
            )
        manifest = {
            "J": self.J,
            "m0": "m0.txt",
            "sampler": self.sampler.to_dict(),
            "S": self.S,
            "total_budget": self.total_budget,
            "pairs": entries,
            "assignment": [int(a) for a in self.assignment],
        }
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
        return out

    @classmethod
    def load(cls, directory) -> "PairBank":
        src = Path(directory)
        manifest = json.loads((src / "manifest.json").read_text())
        pairs = manifest["pairs"]
        bank = cls(
            masks=[read_mask(src / p["mask"]) for p in pairs],
            thetas=[ReconParams.from_dict(p["theta"]) for p in pairs],
            centroids=np.stack([read_umap(src / p["centroid"]) for p in pairs]),
            m0=read_mask(src / manifest["m0"]),
            sampler=SamplerSpec.from_dict(manifest["sampler"]),
            S=int(manifest["S"]),
            total_budget=int(manifest["total_budget"]),
            risks=[p.get("risk") for p in pairs],
            fallback=[bool(p.get("tuned_on_full_set", False)) for p in pairs],
            assignment=manifest.get("assignment", []),
        )
        bank.validate()
        return bank


def lf_uncertainty(
    full_or_lf_k: np.ndarray, m0: SamplingMask, sampler: SamplerSpec, S: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Raw and normalized k-space uncertainty conditioned on ``m0`` data only."""
    if S < 2:
        raise ValueError("S must be at least 2")
    lf_k = apply_mask(full_or_lf_k, m0)
    ens = draw_samples(lf_k, m0, sampler.with_seed(seed), S)
    v = kspace_sample_variance(ens)
    return v, normalize_uncertainty(v)


def images_from_kspace(ks: Sequence[np.ndarray]) -> list[np.ndarray]:
    return [idft2_complex(k).real for k in ks]


def train_adaptive(
    training_k: Sequence[np.ndarray],
    cfg: TrainConfig,
    seed: int,
    training_img: Sequence[np.ndarray] | None = None,
    uncertainties: Sequence[np.ndarray] | None = None,
) -> PairBank:
    """Build ``J`` (mask, reconstructor, centroid) triples from fully sampled data.

    ``uncertainties`` may carry precomputed normalized maps (one per item) to
    share the sampling step across several runs with the same seed.
    """
    if not training_k:
        raise ValueError("empty training set")
    if cfg.S < 2 or cfg.J < 1:
        raise ValueError("need S >= 2 and J >= 1")
    if training_img is None:
        training_img = images_from_kspace(training_k)
    if uncertainties is None:
        uncertainties = training_uncertainties(training_k, cfg.m0, cfg.sampler, cfg.S, seed)
    clusters = kmeans_pp(uncertainties, cfg.J, seed=derive_seed(seed, _CLUSTER))
    masks, thetas, risks, fallback = [], [], [], []
    for j in range(cfg.J):
        c = clusters.centroids[j]
        if cfg.mask_rule == "sorted":
            m = sorted_mask(c, cfg.m0, cfg.total_budget)
        else:
            m = rejection_sample_mask(c, cfg.m0, cfg.total_budget, derive_seed(seed, _MASK, j))
        members = np.flatnonzero(clusters.assignment == j)
        empty = members.size == 0
        if empty:
            logger.warning("cluster %d has no members; tuning on the full training set", j)
            members = np.arange(len(training_k))
        theta, risk = tune_theta(
            [training_k[i] for i in members], [training_img[i] for i in members], m, cfg.recon_grid
        )
        masks.append(m)
        thetas.append(theta)
        risks.append(risk)
        fallback.append(bool(empty))
    bank = PairBank(
        masks=masks,
        thetas=thetas,
        centroids=clusters.centroids,
        m0=cfg.m0,
        sampler=cfg.sampler,
        S=cfg.S,
        total_budget=cfg.total_budget,
        risks=risks,
        fallback=fallback,
        assignment=[int(a) for a in clusters.assignment],
    )
    bank.validate()
    return bank


def training_uncertainties(training_k, m0, sampler, S, seed) -> list[np.ndarray]:
    return [lf_uncertainty(k, m0, sampler, S, derive_seed(seed, _UQ, i))[1] for i, k in enumerate(training_k)]


def select_index(u: np.ndarray, bank: PairBank | np.ndarray) -> int:
    """Index of the nearest centroid; the lowest index wins ties."""
    centroids = bank.centroids if isinstance(bank, PairBank) else np.asarray(bank)
    u = np.asarray(u, dtype=np.float64)
    if u.shape != centroids.shape[1:]:
        raise ValueError(f"shape mismatch: uncertainty {u.shape} vs centroids {centroids.shape[1:]}")
    d = np.sqrt(((centroids - u) ** 2).reshape(centroids.shape[0], -1).sum(axis=1))
    return int(np.argmin(d))


@dataclass
class InferenceResult:
    image: np.ndarray
    chosen: int
    u: np.ndarray


def infer_adaptive(full_k: np.ndarray, bank: PairBank, seed: int) -> InferenceResult:
    full_k = np.asarray(full_k, dtype=np.complex128)
    if full_k.shape != bank.m0.shape:
        raise ValueError(f"shape mismatch: input {full_k.shape} vs bank {bank.m0.shape}")
    # only the M0 view reaches the sampler
    lf_k = apply_mask(full_k, bank.m0)
    try:
        _, u = lf_uncertainty(lf_k, bank.m0, bank.sampler, bank.S, derive_seed(seed, _INFER))
    except DegenerateUncertaintyError as exc:
        raise DegenerateUncertaintyError(
            f"cannot select a pair: {exc}; check the sampler temperature ({bank.sampler.temperature})"
        ) from exc
    j = select_index(u, bank)
    m = bank.masks[j]
    image = reconstruct(apply_mask(full_k, m), m, bank.thetas[j])
    return InferenceResult(image, j, u)

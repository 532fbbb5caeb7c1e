"""Config-driven comparison of mask/reconstructor strategies.

``run_experiment`` trains on the training split, evaluates every requested
method on the validation split and writes ``results.csv`` (one row per
method x acceleration x J), ``per_image.csv`` and the trained pair banks.
Output is a deterministic function of the config.
"""

from __future__ import annotations

import csv
import json
import time
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .dataset import Item, ingest_dataset
from .masks import budget_for, equispaced_mask, lowfreq_mask, random_mask, sorted_mask, vd_mask
from .metrics import lowest_fraction_mean, psnr, ssim
from .pipeline import PairBank, TrainConfig, infer_adaptive, lf_uncertainty, train_adaptive, training_uncertainties
from .recon import DEFAULT_LAMBDA_GRID, ReconParams, reconstruct, tune_theta
from .samplers import SamplerSpec, derive_seed
from .transforms import ImaginaryResidualWarning, SamplingMask, apply_mask

METHODS = (
    "random",
    "vd",
    "equispaced",
    "sorted-self",
    "sorted-another",
    "centroid-sorted",
    "adaptive",
)
RESULT_COLUMNS = (
    "dataset_id",
    "method",
    "accel",
    "J",
    "psnr_mean",
    "ssim_mean",
    "ssim_p5",
    "ssim_p10",
    "runtime_ms",
    "seed",
)
PER_IMAGE_COLUMNS = ("dataset_id", "method", "accel", "J", "item", "chosen", "psnr", "ssim")

# seed stream tags
_SPLIT, _MASKS, _UQ_VAL, _UQ_TRAIN, _TRAIN, _INFER, _SHUFFLE = range(10, 17)


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class SamplerModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    variant: Literal["gaussian_spectral", "jitter_ensemble"] = "jitter_ensemble"
    alpha: float = Field(1.0, gt=0)
    amplitude: float = Field(1.0, gt=0)
    temperature: float = Field(1.0, ge=0)
    seed: int = Field(0, ge=0, lt=2**64)
    smoothing: float = Field(4.0, gt=0)


class ReconModel(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)
    variant: Literal["zero_fill", "fista"] = "zero_fill"
    iters: int = Field(100, ge=1)
    wavelet_levels: int = Field(3, ge=1)
    lambda_grid: list[float] = Field(default_factory=lambda: list(DEFAULT_LAMBDA_GRID), min_length=1)

    @field_validator("lambda_grid")
    @classmethod
    def _nonnegative(cls, v):
        if any(x < 0 for x in v):
            raise ValueError("lambda values must be nonnegative")
        return v

    def grid(self) -> list[ReconParams]:
        if self.variant == "zero_fill":
            return [ReconParams("zero_fill")]
        return [ReconParams("fista", lam, self.iters, self.wavelet_levels) for lam in self.lambda_grid]


class SplitModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    train: float = Field(0.75, gt=0, lt=1)
    val: float = Field(0.25, gt=0, lt=1)

    @model_validator(mode="after")
    def _sums_to_one(self):
        if abs(self.train + self.val - 1.0) > 1e-9:
            raise ValueError("train and val fractions must sum to 1")
        return self


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    dataset_dir: str
    dataset_id: str | None = None
    shape: tuple[int, int]
    kind: Literal["point2d", "line1d"] = "point2d"
    lf_extent: int = Field(8, ge=1)
    accel: list[float] = Field(min_length=1)
    methods: list[Literal[METHODS]] = Field(min_length=1)  # type: ignore[valid-type]
    J: list[int] = Field(default_factory=lambda: [3], min_length=1)
    S: int = Field(16, ge=2)
    sampler: SamplerModel = Field(default_factory=SamplerModel)
    recon: ReconModel = Field(default_factory=ReconModel)
    seed: int = Field(0, ge=0, lt=2**64)
    split: SplitModel = Field(default_factory=SplitModel)
    a_f: float = Field(1.5, gt=0)
    record_runtime: bool = False

    @field_validator("accel")
    @classmethod
    def _accel(cls, v):
        if any(a < 1 for a in v):
            raise ValueError("acceleration rates must be >= 1")
        return v

    @field_validator("J")
    @classmethod
    def _j(cls, v):
        if any(j < 1 for j in v):
            raise ValueError("J values must be >= 1")
        return v

    @model_validator(mode="after")
    def _consistency(self):
        if "equispaced" in self.methods and self.kind != "line1d":
            raise ValueError("method 'equispaced' requires kind 'line1d'")
        return self

    def sampler_spec(self) -> SamplerSpec:
        return SamplerSpec(**self.sampler.model_dump())


def format_validation_error(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        path = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"{path}: {err['msg']}")
    return "\n".join(lines)


def load_config(path_or_dict) -> ExperimentConfig:
    if isinstance(path_or_dict, (str, Path)):
        path = Path(path_or_dict)
        try:
            raw = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        base = path.parent
    else:
        raw, base = dict(path_or_dict), Path.cwd()
    try:
        cfg = ExperimentConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(format_validation_error(exc)) from exc
    data_dir = Path(cfg.dataset_dir)
    if not data_dir.is_absolute():
        cfg.dataset_dir = str((base / data_dir).resolve())
    return cfg


@dataclass
class Evaluation:
    names: list[str]
    chosen: list[int]
    psnr: list[float]
    ssim: list[float]
    runtime_ms: float


def split_items(items: list[Item], cfg: ExperimentConfig) -> tuple[list[Item], list[Item]]:
    order = np.random.default_rng(derive_seed(cfg.seed, _SPLIT)).permutation(len(items))
    n_train = int(round(cfg.split.train * len(items)))
    n_train = min(max(n_train, 1), len(items) - 1)
    train = [items[i] for i in sorted(order[:n_train])]
    val = [items[i] for i in sorted(order[n_train:])]
    return train, val


def derangement(n: int, seed: int) -> np.ndarray:
    """Random permutation without fixed points (rejection sampling)."""
    if n < 2:
        raise ValueError("a derangement needs at least two items")
    rng = np.random.default_rng(seed)
    while True:
        perm = rng.permutation(n)
        if not np.any(perm == np.arange(n)):
            return perm


def _score(items: list[Item], masks: list[SamplingMask], thetas: list[ReconParams]) -> tuple[list, list]:
    ps, ss = [], []
    for item, m, theta in zip(items, masks, thetas):
        out = reconstruct(apply_mask(item.kspace, m), m, theta)
        ps.append(psnr(item.image, out))
        ss.append(ssim(item.image, out))
    return ps, ss


def tune_shared_theta(items: list[Item], masks: list[SamplingMask], grid: list[ReconParams]) -> ReconParams:
    """One reconstructor serving a different mask per item."""
    if len(grid) == 1:
        return grid[0]
    best, best_risk = grid[0], np.inf
    for theta in grid:
        _, ss = _score(items, masks, [theta] * len(items))
        risk = float(np.mean([1 - s for s in ss]))
        if risk < best_risk:
            best, best_risk = theta, risk
    return best


class ExperimentRunner:
    def __init__(self, cfg: ExperimentConfig, out_dir: Path):
        self.cfg = cfg
        self.out_dir = out_dir
        items = ingest_dataset(cfg.dataset_dir)
        for item in items:
            if item.image.shape != tuple(cfg.shape):
                raise ConfigError(f"shape: {item.name} is {item.image.shape}, config says {tuple(cfg.shape)}")
        if len(items) < 3:
            raise ConfigError("dataset_dir: need at least 3 images for a train/val split")
        self.dataset_id = cfg.dataset_id or Path(cfg.dataset_dir).name
        self.train, self.val = split_items(items, cfg)
        self.m0 = lowfreq_mask(tuple(cfg.shape), cfg.kind, cfg.lf_extent)
        self.spec = cfg.sampler_spec()
        self.grid = cfg.recon.grid()
        self._val_v = None
        self._train_v = None
        self._train_u = None

    # uncertainty maps are shared by every method that needs them
    def val_uncertainty(self) -> list[np.ndarray]:
        if self._val_v is None:
            self._val_v = [
                lf_uncertainty(it.kspace, self.m0, self.spec, self.cfg.S, derive_seed(self.cfg.seed, _UQ_VAL, i))[0]
                for i, it in enumerate(self.val)
            ]
        return self._val_v

    def train_uncertainty(self) -> list[np.ndarray]:
        if self._train_v is None:
            self._train_v = [
                lf_uncertainty(it.kspace, self.m0, self.spec, self.cfg.S, derive_seed(self.cfg.seed, _UQ_TRAIN, i))[0]
                for i, it in enumerate(self.train)
            ]
        return self._train_v

    def train_normalized(self) -> list[np.ndarray]:
        if self._train_u is None:
            self._train_u = training_uncertainties(
                [it.kspace for it in self.train], self.m0, self.spec, self.cfg.S, derive_seed(self.cfg.seed, _TRAIN)
            )
        return self._train_u

    def _fixed_mask(self, m: SamplingMask) -> Evaluation:
        t0 = time.perf_counter()
        theta, _ = tune_theta([it.kspace for it in self.train], [it.image for it in self.train], m, self.grid)
        ps, ss = _score(self.val, [m] * len(self.val), [theta] * len(self.val))
        return Evaluation([it.name for it in self.val], [-1] * len(ps), ps, ss, (time.perf_counter() - t0) * 1e3)

    def _sorted(self, budget: int, shuffle: bool) -> Evaluation:
        t0 = time.perf_counter()
        masks = [sorted_mask(v, self.m0, budget) for v in self.val_uncertainty()]
        if len(self.grid) > 1:
            train_masks = [sorted_mask(v, self.m0, budget) for v in self.train_uncertainty()]
            theta = tune_shared_theta(self.train, train_masks, self.grid)
        else:
            theta = self.grid[0]
        if shuffle:
            perm = derangement(len(masks), derive_seed(self.cfg.seed, _SHUFFLE, budget))
            masks = [masks[p] for p in perm]
        ps, ss = _score(self.val, masks, [theta] * len(self.val))
        return Evaluation([it.name for it in self.val], [-1] * len(ps), ps, ss, (time.perf_counter() - t0) * 1e3)

    def _banked(self, budget: int, J: int, rule: str, tag: str, accel: float) -> Evaluation:
        t0 = time.perf_counter()
        cfg = TrainConfig(self.m0, self.spec, self.cfg.S, J, budget, self.grid, mask_rule=rule)
        bank = train_adaptive(
            [it.kspace for it in self.train],
            cfg,
            derive_seed(self.cfg.seed, _TRAIN),
            training_img=[it.image for it in self.train],
            uncertainties=self.train_normalized(),
        )
        bank.save(self.out_dir / "banks" / f"{tag}_r{accel:g}_J{J}")
        chosen, ps, ss = [], [], []
        for i, it in enumerate(self.val):
            res = infer_adaptive(it.kspace, bank, derive_seed(self.cfg.seed, _INFER, i))
            chosen.append(res.chosen)
            ps.append(psnr(it.image, res.image))
            ss.append(ssim(it.image, res.image))
        return Evaluation([it.name for it in self.val], chosen, ps, ss, (time.perf_counter() - t0) * 1e3)

    def evaluate(self, method: str, accel: float, ai: int, J: int) -> Evaluation:
        shape, kind = tuple(self.cfg.shape), self.cfg.kind
        budget = budget_for(shape, accel, kind)
        if budget < self.m0.budget:
            raise ConfigError(f"accel: rate {accel:g} leaves fewer samples than the initial mask")
        mask_seed = derive_seed(self.cfg.seed, _MASKS, ai)
        if method == "random":
            return self._fixed_mask(random_mask(shape, kind, self.m0, budget, mask_seed))
        if method == "vd":
            return self._fixed_mask(vd_mask(shape, kind, self.m0, budget, self.cfg.a_f, mask_seed))
        if method == "equispaced":
            return self._fixed_mask(equispaced_mask(shape, self.m0, budget))
        if method == "sorted-self":
            return self._sorted(budget, shuffle=False)
        if method == "sorted-another":
            return self._sorted(budget, shuffle=True)
        if method == "centroid-sorted":
            return self._banked(budget, J, "sorted", method, accel)
        if method == "adaptive":
            return self._banked(budget, J, "rejection", method, accel)
        raise ConfigError(f"methods: unknown method {method!r}")


def _fmt(x: float) -> str:
    return "inf" if np.isinf(x) else f"{x:.6f}"


def run_experiment(config, out_csv) -> Path:
    """Run every method x accel x J in ``config`` and write the CSV reports."""
    cfg = config if isinstance(config, ExperimentConfig) else load_config(config)
    out_csv = Path(out_csv)
    out_dir = out_csv.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    runner = ExperimentRunner(cfg, out_dir)
    rows, image_rows, timings = [], [], []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ImaginaryResidualWarning)
        for ai, accel in enumerate(cfg.accel):
            for method in cfg.methods:
                cached = None
                for J in cfg.J:
                    if method in ("centroid-sorted", "adaptive") or cached is None:
                        cached = runner.evaluate(method, accel, ai, J)
                    ev = cached
                    rows.append(
                        {
                            "dataset_id": runner.dataset_id,
                            "method": method,
                            "accel": f"{accel:g}",
                            "J": J,
                            "psnr_mean": _fmt(float(np.mean(ev.psnr))),
                            "ssim_mean": _fmt(float(np.mean(ev.ssim))),
                            "ssim_p5": _fmt(lowest_fraction_mean(ev.ssim, 0.05)),
                            "ssim_p10": _fmt(lowest_fraction_mean(ev.ssim, 0.10)),
                            "runtime_ms": f"{ev.runtime_ms:.1f}" if cfg.record_runtime else "",
                            "seed": cfg.seed,
                        }
                    )
                    timings.append((method, accel, J, ev.runtime_ms))
                    for name, ch, p, s in zip(ev.names, ev.chosen, ev.psnr, ev.ssim):
                        image_rows.append(
                            {
                                "dataset_id": runner.dataset_id,
                                "method": method,
                                "accel": f"{accel:g}",
                                "J": J,
                                "item": name,
                                "chosen": ch,
                                "psnr": _fmt(p),
                                "ssim": _fmt(s),
                            }
                        )
    _write_csv(out_csv, RESULT_COLUMNS, rows)
    _write_csv(out_dir / (out_csv.stem + "_per_image.csv"), PER_IMAGE_COLUMNS, image_rows)
    with open(out_dir / (out_csv.stem + "_timings.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "accel", "J", "wall_ms"])
        for method, accel, J, ms in timings:
            writer.writerow([method, f"{accel:g}", J, f"{ms:.1f}"])
    split = {"train": [it.name for it in runner.train], "val": [it.name for it in runner.val]}
    (out_dir / (out_csv.stem + "_split.json")).write_text(json.dumps(split, indent=2) + "\n")
    return out_csv


def _write_csv(path: Path, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def read_results(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def load_bank(directory) -> PairBank:
    return PairBank.load(directory)

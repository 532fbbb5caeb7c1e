"""Command-line entry point: ``adaptcs <command> ...``.

Exit codes: 0 success, 1 configuration or input error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .experiment import _TRAIN, ConfigError, ExperimentRunner, load_config, run_experiment
from .io import FormatError, read_kgrid, write_mask, write_pgm
from .masks import budget_for, equispaced_mask, lowfreq_mask, random_mask, vd_mask
from .phantoms import KINDS, generate_phantoms
from .pipeline import PairBank, TrainConfig, infer_adaptive, train_adaptive
from .samplers import derive_seed
from .transforms import ImaginaryResidualWarning
from .verify import SUITES, run_suite

log = logging.getLogger("adaptcs")


def parse_shape(text: str) -> tuple[int, int]:
    try:
        h, w = (int(p) for p in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"shape must look like 64x64, got {text!r}") from None
    if h < 1 or w < 1:
        raise argparse.ArgumentTypeError("shape sides must be positive")
    return h, w


def cmd_train(args) -> int:
    cfg = load_config(args.config)
    out = Path(args.out)
    runner = ExperimentRunner(cfg, out)
    accel, J = cfg.accel[0], cfg.J[0]
    budget = budget_for(tuple(cfg.shape), accel, cfg.kind)
    tcfg = TrainConfig(runner.m0, runner.spec, cfg.S, J, budget, runner.grid)
    bank = train_adaptive(
        [it.kspace for it in runner.train],
        tcfg,
        derive_seed(cfg.seed, _TRAIN),
        training_img=[it.image for it in runner.train],
    )
    bank.save(out)
    split = {"train": [it.name for it in runner.train], "val": [it.name for it in runner.val]}
    (out / "split.json").write_text(json.dumps(split, indent=2) + "\n")
    log.info("trained J=%d bank at %gx into %s", J, accel, out)
    return 0


def cmd_infer(args) -> int:
    bank = PairBank.load(args.bank)
    k = read_kgrid(args.input)
    res = infer_adaptive(k, bank, args.seed)
    write_pgm(args.out, res.image)
    if args.row:
        row_path = Path(args.row)
        new = not row_path.exists()
        with open(row_path, "a", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            if new:
                writer.writerow(["input", "chosen", "theta", "output"])
            writer.writerow([args.input, res.chosen, json.dumps(bank.thetas[res.chosen].to_dict()), args.out])
    print(json.dumps({"chosen": res.chosen, "output": str(args.out)}))
    return 0


def cmd_eval(args) -> int:
    path = run_experiment(load_config(args.config), args.out)
    log.info("wrote %s", path)
    return 0


def cmd_masks(args) -> int:
    shape, layout = args.shape, args.layout
    m0 = lowfreq_mask(shape, layout, args.lf_extent)
    if args.kind == "lowfreq":
        m = m0
    else:
        budget = budget_for(shape, args.accel, layout)
        if args.kind == "random":
            m = random_mask(shape, layout, m0, budget, args.seed)
        elif args.kind == "vd":
            m = vd_mask(shape, layout, m0, budget, args.a_f, args.seed)
        else:
            m = equispaced_mask(shape, m0, budget)
    write_mask(args.out, m)
    print(json.dumps({"budget": m.budget, "acceleration": m.acceleration, "out": str(args.out)}))
    return 0


def cmd_phantom(args) -> int:
    generate_phantoms(args.kind, args.n, args.shape, args.seed, args.out)
    return 0


def _json_default(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if isinstance(x, np.generic):
        return x.item()
    raise TypeError(type(x))


def cmd_verify(args) -> int:
    report = run_suite(args.suite)
    print(json.dumps(report, indent=2, default=_json_default))
    return 0 if all(r["passed"] for r in report.values()) else 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adaptcs", description="Uncertainty-driven adaptive k-space sampling.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("train", help="train a pair bank from a config")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("infer", help="select a pair and reconstruct one k-space grid")
    s.add_argument("--bank", required=True)
    s.add_argument("--input", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--row", help="append a result row to this CSV")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_infer)

    s = sub.add_parser("eval", help="run the comparison harness")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("masks", help="write a baseline mask")
    s.add_argument("--kind", choices=["random", "vd", "equispaced", "lowfreq"], required=True)
    s.add_argument("--layout", choices=["point2d", "line1d"], default="point2d")
    s.add_argument("--accel", type=float, default=4.0)
    s.add_argument("--shape", type=parse_shape, required=True)
    s.add_argument("--lf-extent", type=int, default=8)
    s.add_argument("--a-f", type=float, default=1.5)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_masks)

    s = sub.add_parser("phantom", help="synthesize a phantom dataset")
    s.add_argument("--kind", choices=KINDS, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--shape", type=parse_shape, default=(64, 64))
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_phantom)

    s = sub.add_parser("verify", help="run oracle checks and print a JSON verdict")
    s.add_argument("--suite", choices=SUITES + ("all",), default="all")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse usage errors count as configuration errors
        return 1 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if not args.verbose:
        # expected whenever a mask is not conjugate symmetric
        warnings.simplefilter("ignore", ImaginaryResidualWarning)
    try:
        return args.func(args)
    except (ConfigError, FormatError, ValueError, FileNotFoundError, PermissionError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

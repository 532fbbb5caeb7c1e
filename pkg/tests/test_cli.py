import csv
import json

import numpy as np

from adaptcs.cli import main
from adaptcs.io import read_mask, read_pgm, write_kgrid
from adaptcs.transforms import dft2_unitary


def test_phantom_masks_train_infer_eval(tmp_path, capsys):
    data = tmp_path / "data"
    assert main(["phantom", "--kind", "stripes_hv", "--n", "8", "--shape", "16x16", "--out", str(data)]) == 0
    assert len(list(data.glob("*.pgm"))) == 8

    assert main(["masks", "--kind", "vd", "--shape", "16x16", "--accel", "4", "--lf-extent", "4", "--out", str(tmp_path / "m.txt")]) == 0
    assert read_mask(tmp_path / "m.txt").budget == 64

    cfg = {"dataset_dir": "data", "shape": [16, 16], "lf_extent": 4, "accel": [4], "methods": ["adaptive"], "J": [2], "S": 4}
    (tmp_path / "cfg.json").write_text(json.dumps(cfg))
    assert main(["train", "--config", str(tmp_path / "cfg.json"), "--out", str(tmp_path / "bank")]) == 0
    assert (tmp_path / "bank" / "manifest.json").exists()

    img = read_pgm(sorted(data.glob("*.pgm"))[0])
    write_kgrid(tmp_path / "x.kgrd", dft2_unitary(img))
    capsys.readouterr()
    args = ["infer", "--bank", str(tmp_path / "bank"), "--input", str(tmp_path / "x.kgrd")]
    args += ["--out", str(tmp_path / "x.pgm"), "--row", str(tmp_path / "rows.csv")]
    assert main(args) == 0
    assert json.loads(capsys.readouterr().out)["chosen"] in (0, 1)
    assert read_pgm(tmp_path / "x.pgm").shape == (16, 16)
    with open(tmp_path / "rows.csv") as fh:
        assert len(list(csv.DictReader(fh))) == 1

    assert main(["eval", "--config", str(tmp_path / "cfg.json"), "--out", str(tmp_path / "res" / "results.csv")]) == 0
    assert (tmp_path / "res" / "results.csv").exists()


def test_config_error_exit_code(tmp_path, capsys):
    (tmp_path / "cfg.json").write_text(json.dumps({"dataset_dir": ".", "shape": [8, 8], "accel": [2], "methods": []}))
    assert main(["eval", "--config", str(tmp_path / "cfg.json"), "--out", str(tmp_path / "r.csv")]) == 1
    assert "methods" in capsys.readouterr().err


def test_usage_error_exit_code():
    assert main(["masks", "--kind", "nope"]) == 1
    assert main(["phantom", "--kind", "stripes_h", "--n", "1", "--shape", "axb", "--out", "x"]) == 1


def test_equispaced_needs_lines(tmp_path):
    assert main(["masks", "--kind", "equispaced", "--shape", "8x8", "--out", str(tmp_path / "m.txt")]) == 1
    args = ["masks", "--kind", "equispaced", "--layout", "line1d", "--lf-extent", "2", "--shape", "8x8"]
    assert main(args + ["--out", str(tmp_path / "m.txt")]) == 0


def test_verify_json(capsys):
    assert main(["verify", "--suite", "theorem_s1"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["theorem_s1"]["passed"]
    assert np.isclose(report["theorem_s1"]["analytic_lhs"], 1.0)


def test_verify_failure_exit_code(monkeypatch):
    import adaptcs.cli as cli

    monkeypatch.setattr(cli, "run_suite", lambda name: {name: {"passed": False}})
    assert main(["verify", "--suite", "parseval"]) == 2

import json

import numpy as np
import pytest

from adaptcs.dataset import ingest_dataset
from adaptcs.io import FormatError, write_pgm
from adaptcs.phantoms import band_energy_ratio, generate_phantoms, make_phantom
from adaptcs.recon import haar2
from adaptcs.transforms import dft2_unitary


@pytest.mark.parametrize("kind, vertical", [("stripes_h", True), ("stripes_v", False)])
def test_stripe_band_energy(kind, vertical):
    for i in range(10):
        power = np.abs(dft2_unitary(make_phantom(kind, (64, 64), 0, i))) ** 2
        ratio = band_energy_ratio(power)
        assert ratio > 2 if vertical else ratio < 0.5


def test_haar_sparse_support():
    x = make_phantom("haar_sparse", (64, 64), 3)
    assert np.count_nonzero(np.abs(haar2(x, 6)) > 1e-10) == 32
    assert x.min() >= -1e-12 and np.isclose(x.max(), 1)


def test_generate_count_manifest_and_determinism(tmp_path):
    a = generate_phantoms("mixed", 5, (16, 16), 7, tmp_path / "a")
    b = generate_phantoms("mixed", 5, (16, 16), 7, tmp_path / "b")
    files = sorted(p.name for p in a.glob("*.pgm"))
    assert len(files) == 5
    manifest = json.loads((a / "manifest.json").read_text())
    assert [f["file"] for f in manifest["files"]] == sorted(files, key=lambda n: n.split("_")[-1])
    for name in files:
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_generate_errors(tmp_path):
    with pytest.raises(ValueError):
        generate_phantoms("stripes_h", 0, (8, 8), 0, tmp_path)
    with pytest.raises(ValueError):
        generate_phantoms("plaid", 1, (8, 8), 0, tmp_path)


def test_ingest_sorted_and_round_trip(tmp_path):
    generate_phantoms("smooth_blobs", 3, (16, 16), 1, tmp_path)
    items = ingest_dataset(tmp_path)
    assert [it.name for it in items] == sorted(p.name for p in tmp_path.glob("*.pgm"))
    for i, it in enumerate(items):
        truth = make_phantom("smooth_blobs", (16, 16), 1, i)
        assert np.abs(it.image - truth).max() <= 1 / 65535
        np.testing.assert_allclose(it.kspace, dft2_unitary(it.image))


def test_ingest_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        ingest_dataset(tmp_path / "missing")
    with pytest.raises(ValueError):
        ingest_dataset(tmp_path)
    write_pgm(tmp_path / "a.pgm", np.zeros((4, 4)))
    (tmp_path / "b.pgm").write_bytes((tmp_path / "a.pgm").read_bytes()[:-4])
    with pytest.raises(FormatError, match="b.pgm"):
        ingest_dataset(tmp_path)

import numpy as np
import pytest

from adaptcs.io import (
    FormatError,
    format_mask,
    parse_mask,
    read_kgrid,
    read_mask,
    read_pgm,
    read_umap,
    write_kgrid,
    write_mask,
    write_pgm,
    write_umap,
)
from adaptcs.masks import lowfreq_mask
from adaptcs.transforms import SamplingMask


def test_kgrid_round_trip_float32(tmp_path, rng):
    k = rng.standard_normal((5, 7)) + 1j * rng.standard_normal((5, 7))
    write_kgrid(tmp_path / "a.kgrd", k)
    back = read_kgrid(tmp_path / "a.kgrd")
    assert back.shape == (5, 7)
    np.testing.assert_allclose(back, k.astype(np.complex64), rtol=0, atol=0)


def test_umap_round_trip_and_magic(tmp_path, rng):
    v = rng.random((4, 6))
    write_umap(tmp_path / "u.umap", v)
    np.testing.assert_allclose(read_umap(tmp_path / "u.umap"), v.astype(np.float32))
    with pytest.raises(FormatError):
        read_kgrid(tmp_path / "u.umap")


def test_kgrid_truncated(tmp_path, rng):
    write_kgrid(tmp_path / "a.kgrd", np.ones((4, 4), complex))
    data = (tmp_path / "a.kgrd").read_bytes()
    (tmp_path / "a.kgrd").write_bytes(data[:-3])
    with pytest.raises(FormatError):
        read_kgrid(tmp_path / "a.kgrd")


@pytest.mark.parametrize("mask", [lowfreq_mask((6, 8), "point2d", 4), SamplingMask((6, 8), "line1d", [0, 3, 7])])
def test_mask_text_round_trip(tmp_path, mask):
    write_mask(tmp_path / "m.txt", mask)
    assert read_mask(tmp_path / "m.txt") == mask
    assert parse_mask(format_mask(mask)) == mask


def test_mask_parse_errors():
    with pytest.raises(FormatError):
        parse_mask("MASK 2 2 point2d\n01\n1")
    with pytest.raises(FormatError):
        parse_mask("NOPE 2 2 point2d\n01\n10")
    with pytest.raises(FormatError):
        parse_mask("MASK 2 2 point2d\n0x\n10")


def test_pgm_round_trip_16bit(tmp_path, rng):
    img = rng.random((9, 11))
    write_pgm(tmp_path / "x.pgm", img)
    back = read_pgm(tmp_path / "x.pgm")
    assert np.abs(back - img).max() <= 0.5 / 65535 + 1e-12


def test_pgm_8bit_with_comments(tmp_path):
    data = b"P5\n# made by hand\n3 2\n# another\n255\n" + bytes([0, 51, 102, 153, 204, 255])
    (tmp_path / "x.pgm").write_bytes(data)
    np.testing.assert_allclose(read_pgm(tmp_path / "x.pgm").ravel(), np.arange(6) / 5)


def test_pgm_truncated_names_file_and_offset(tmp_path):
    write_pgm(tmp_path / "bad.pgm", np.zeros((4, 4)))
    data = (tmp_path / "bad.pgm").read_bytes()
    (tmp_path / "bad.pgm").write_bytes(data[:-5])
    with pytest.raises(FormatError, match="bad.pgm.*byte"):
        read_pgm(tmp_path / "bad.pgm")


def test_pgm_wrong_magic(tmp_path):
    (tmp_path / "p2.pgm").write_bytes(b"P2\n1 1\n255\n0\n")
    with pytest.raises(FormatError, match="p2.pgm"):
        read_pgm(tmp_path / "p2.pgm")

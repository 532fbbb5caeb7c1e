"""On-disk formats: KGRD/UMAP binary grids, mask text files, 16-bit PGM."""

from __future__ import annotations

import os
import re
import struct

import numpy as np

from .transforms import SamplingMask


class FormatError(ValueError):
    """Malformed file; message names the file and byte offset when known."""


def _write_grid(path, magic: bytes, values: np.ndarray) -> None:
    values = np.asarray(values)
    if values.ndim != 2:
        raise ValueError("grid must be 2-D")
    h, w = values.shape
    pairs = np.empty((h, w, 2), dtype="<f4")
    pairs[..., 0] = np.real(values)
    pairs[..., 1] = np.imag(values)
    with open(path, "wb") as fh:
        fh.write(magic + struct.pack("<II", h, w) + pairs.tobytes())


def _read_grid(path, magic: bytes) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != magic:
        raise FormatError(f"{path}: bad magic {data[:4]!r} at offset 0, expected {magic!r}")
    if len(data) < 12:
        raise FormatError(f"{path}: truncated header at offset {len(data)}")
    h, w = struct.unpack("<II", data[4:12])
    need = 12 + 8 * h * w
    if len(data) != need:
        raise FormatError(f"{path}: expected {need} bytes, file ends at offset {len(data)}")
    pairs = np.frombuffer(data, dtype="<f4", offset=12).reshape(h, w, 2).astype(np.float64)
    return pairs[..., 0] + 1j * pairs[..., 1]


def write_kgrid(path, k: np.ndarray) -> None:
    _write_grid(path, b"KGRD", k)


def read_kgrid(path) -> np.ndarray:
    return _read_grid(path, b"KGRD")


def write_umap(path, v: np.ndarray) -> None:
    _write_grid(path, b"UMAP", np.asarray(v, dtype=np.float64))


def read_umap(path) -> np.ndarray:
    return _read_grid(path, b"UMAP").real.copy()


def format_mask(m: SamplingMask) -> str:
    h, w = m.shape
    lines = [f"MASK {h} {w} {m.kind}"]
    if m.kind == "line1d":
        row = np.zeros(w, dtype=bool)
        row[m.acquired] = True
        lines.append("".join("1" if b else "0" for b in row))
    else:
        for row in m.dense():
            lines.append("".join("1" if b else "0" for b in row))
    return "\n".join(lines) + "\n"


def parse_mask(text: str, source: str = "<mask>") -> SamplingMask:
    lines = text.splitlines()
    if not lines:
        raise FormatError(f"{source}: empty mask file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "MASK" or head[3] not in ("point2d", "line1d"):
        raise FormatError(f"{source}: bad header {lines[0]!r}")
    h, w, kind = int(head[1]), int(head[2]), head[3]
    body = lines[1:]
    want = 1 if kind == "line1d" else h
    if len(body) < want:
        raise FormatError(f"{source}: expected {want} rows, found {len(body)}")
    rows = body[:want]
    for i, row in enumerate(rows):
        if len(row) != w or set(row) - {"0", "1"}:
            raise FormatError(f"{source}: row {i + 1} is not {w} characters of 0/1")
    bits = np.array([[c == "1" for c in row] for row in rows], dtype=bool)
    if kind == "line1d":
        return SamplingMask((h, w), "line1d", np.flatnonzero(bits[0]))
    return SamplingMask((h, w), "point2d", np.flatnonzero(bits))


def write_mask(path, m: SamplingMask) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_mask(m))


def read_mask(path) -> SamplingMask:
    with open(path, encoding="ascii") as fh:
        return parse_mask(fh.read(), source=os.fspath(path))


def write_pgm(path, img: np.ndarray) -> None:
    """16-bit binary PGM; values in [0, 1] mapped linearly to 0..65535."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError("image must be 2-D")
    h, w = img.shape
    q = np.rint(np.clip(img, 0.0, 1.0) * 65535.0).astype(">u2")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n65535\n".encode("ascii") + q.tobytes())


_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def read_pgm(path) -> np.ndarray:
    """Read a binary PGM (8- or 16-bit) into floats in [0, 1]."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] != b"P5":
        raise FormatError(f"{path}: not a binary PGM (offset 0)")
    pos = 2
    fields = []
    for _ in range(3):
        match = _TOKEN.match(data, pos)
        if match is None or not match.group(1).isdigit():
            raise FormatError(f"{path}: malformed header at offset {pos}")
        fields.append(int(match.group(1)))
        pos = match.end()
    w, h, maxval = fields
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise FormatError(f"{path}: missing header terminator at offset {pos}")
    pos += 1
    if not 0 < maxval < 65536 or w < 1 or h < 1:
        raise FormatError(f"{path}: invalid header values at offset {pos}")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    need = w * h * dtype.itemsize
    if len(data) - pos < need:
        raise FormatError(
            f"{path}: truncated pixel data, {need} bytes needed from offset {pos}, "
            f"file ends at offset {len(data)}"
        )
    pix = np.frombuffer(data, dtype=dtype, count=w * h, offset=pos).reshape(h, w)
    return pix.astype(np.float64) / maxval

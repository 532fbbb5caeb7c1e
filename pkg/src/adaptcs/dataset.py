"""Directory-of-PGM datasets."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .io import read_pgm
from .transforms import dft2_unitary


@dataclass
class Item:
    name: str
    image: np.ndarray
    kspace: np.ndarray


def ingest_dataset(directory) -> list[Item]:
    """Load every ``*.pgm`` in filename order as (image, unitary k-space) pairs."""
    root = Path(directory)
    if not root.is_dir():
        raise FileNotFoundError(f"dataset directory {root} does not exist")
    files = sorted(p for p in root.iterdir() if p.suffix.lower() == ".pgm")
    if not files:
        raise ValueError(f"dataset directory {root} contains no .pgm files")
    items = []
    for path in files:
        img = read_pgm(path)
        items.append(Item(path.name, img, dft2_unitary(img)))
    return items

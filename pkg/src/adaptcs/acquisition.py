"""Multislice acquisition ordering that hides uncertainty-estimation latency."""

from __future__ import annotations

from typing import NamedTuple


class Readout(NamedTuple):
    slice: int
    phase: str  # "ACS" or "HF"
    index: int

    def label(self) -> str:
        return f"S{self.slice}{self.phase[0]}{self.index}"


def multislice_schedule(n_slices: int, n_acs: int, n_hf: int) -> list[Readout]:
    """ACS lines of every slice first, then the selected HF lines.

    Within each phase the line index is the outer loop and the slice the
    inner one, so slice ``i`` waits ``n_slices - 1`` readouts between its
    last ACS line and its first HF line.  Indices are 1-based.
    """
    if min(n_slices, n_acs, n_hf) < 1:
        raise ValueError("slice, ACS and HF counts must all be positive")
    order = [Readout(i, "ACS", j) for j in range(1, n_acs + 1) for i in range(1, n_slices + 1)]
    order += [Readout(i, "HF", j) for j in range(1, n_hf + 1) for i in range(1, n_slices + 1)]
    return order

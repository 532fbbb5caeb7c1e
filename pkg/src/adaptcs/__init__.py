"""Adaptive selection of sampling masks and reconstructors for Fourier compressed sensing."""

__version__ = "0.1.0"

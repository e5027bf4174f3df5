"""Fourier interpolation at square-root nodes via the oscillator representation."""

__version__ = "0.1.0"

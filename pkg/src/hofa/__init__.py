"""Computational tools for higher-order Fourier analysis of multiplicative functions."""

__version__ = "0.1.0"

"""Zeta zeros, pair correlation and prediction kernels."""
__version__ = "0.1.0"

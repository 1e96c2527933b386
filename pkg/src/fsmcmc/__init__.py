"""Dimension-robust MCMC for functions."""

__version__ = "0.1.0"

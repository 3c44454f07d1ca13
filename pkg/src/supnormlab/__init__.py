"""Sup-norm and spectral-average diagnostics for holomorphic forms of real weight."""

__version__ = "0.1.0"

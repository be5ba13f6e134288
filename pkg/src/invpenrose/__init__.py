"""Exact-arithmetic inverse Penrose transform on flat twistor spaces."""

__version__ = "0.1.0"

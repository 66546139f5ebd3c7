"""Planted CSP / bipartite block model generation, reduction and subsampled power iteration."""

__version__ = "0.1.0"

"""Bipartite discrimination of N-fold Bell ensembles."""

__version__ = "0.1.0"

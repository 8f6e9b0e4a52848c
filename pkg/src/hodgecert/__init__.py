"""Exact certification of infinitesimal Hodge-theoretic criteria in Jacobian rings."""

__version__ = "0.1.0"

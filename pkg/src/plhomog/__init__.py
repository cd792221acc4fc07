"""Eigenvalues of the 1-D p-Laplacian with rapidly oscillating periodic weight."""

__version__ = "0.1.0"

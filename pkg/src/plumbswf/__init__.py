"""Lattice homology, graded roots and Seiberg-Witten-Floer cell models for
negative-definite plumbed 3-manifolds."""

__version__ = "0.1.0"

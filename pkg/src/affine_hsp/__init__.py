"""Simulator for the hidden-subgroup algorithm on the affine group of GF(q)."""

__version__ = "0.1.0"

"""Exact calculator for Milnor-Witt K-theory, twisted Rost-Schmid complexes
and finite MW-correspondences."""

__version__ = "0.1.0"

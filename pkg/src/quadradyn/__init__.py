"""Qualitative analysis of the five quadratic planar families."""

__version__ = "0.1.0"

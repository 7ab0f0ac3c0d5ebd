"""Exact curvature calculus for nonexpanding hyperheavenly metrics."""

__version__ = "0.1.0"

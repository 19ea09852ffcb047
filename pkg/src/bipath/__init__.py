"""Interval decompositions and persistence diagrams over bipath posets."""

__version__ = "0.1.0"

"""Visibility-query data structures for simple polygons."""

__version__ = "0.1.0"

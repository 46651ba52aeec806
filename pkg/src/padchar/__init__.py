"""Exact arithmetic for positive-depth character formulae."""

__version__ = "0.1.0"

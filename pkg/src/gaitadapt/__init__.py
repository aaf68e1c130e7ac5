"""Reduced-order biped walking with adaptive velocity regulation."""

__version__ = "0.1.0"

"""Counting and density tools for real algebraic integers of bounded height."""

__version__ = "0.1.0"

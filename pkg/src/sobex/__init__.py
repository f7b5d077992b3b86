"""Numerical tools for Sobolev homeomorphic extensions of boundary maps."""

__version__ = "0.1.0"

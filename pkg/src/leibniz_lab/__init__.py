"""Exact-arithmetic toolkit for filiform Leibniz algebras."""

__version__ = "0.1.0"

"""Derived functors of destabilization and the algebraic spectral sequence."""

__version__ = "0.1.0"

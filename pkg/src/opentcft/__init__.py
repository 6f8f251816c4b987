"""Exact computations for open topological conformal field theories.

Finite A-infinity / Calabi-Yau categories, Hochschild (co)homology over Q,
the cellular open-surface category and the annulus tensor complex.
"""

__version__ = "0.1.0"

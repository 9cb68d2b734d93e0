"""Exact workbench for Cubist subsets of Z^r and their graded Cartan data."""

from .laurent import LaurentPoly, TruncSeries, geometric_power, quantum_integer
from .cubist import Box, Corner, CubistSet, Facet, Flat, Weight2, distance, facet_points, shift

__all__ = [
    "LaurentPoly",
    "TruncSeries",
    "geometric_power",
    "quantum_integer",
    "Box",
    "Corner",
    "CubistSet",
    "Facet",
    "Flat",
    "Weight2",
    "distance",
    "facet_points",
    "shift",
]

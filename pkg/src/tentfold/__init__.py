"""Tent-map inverse limits: folding patterns, natural chains and symmetry certificates."""

from .numerics import LazyReal, QuadraticNumber, compare, format_scalar, parse_slope
from .tentmap import TentMap

__version__ = "0.1.0"

__all__ = ["LazyReal", "QuadraticNumber", "TentMap", "compare", "format_scalar", "parse_slope", "__version__"]

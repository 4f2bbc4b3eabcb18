"""Exact computations for Hecke pairs, zeta sums and KMS states over Q and quadratic fields."""
from .quadfield import QQ, FieldElement, QuadField, make_field, parse_element, unit_info

__all__ = ["QQ", "FieldElement", "QuadField", "make_field", "parse_element", "unit_info"]
__version__ = "0.1.0"

"""Numerical laboratory for weighted norm inequalities of integral
transforms with power-type kernels (Hankel, Struve, sine and relatives)."""

__version__ = "0.1.0"

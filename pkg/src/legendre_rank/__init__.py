"""Exact descent, reduction and parity computations for the Legendre family
y^2 = x(x+1)(x+t) and related curves."""

__version__ = "0.1.0"

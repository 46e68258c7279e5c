"""Mutually unbiased product bases in C^2 (x) C^2 and C^2 (x) C^3."""

__version__ = "0.1.0"

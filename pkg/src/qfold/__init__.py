"""Exact quantization of symplectic toric quasifolds."""

__version__ = "0.1.0"

"""Typed plug/socket boards for computable functions and second-order functionals."""

__version__ = "0.1.0"

"""Blocking measures, standing up, and generalized Frobenius partitions."""

__version__ = "0.1.0"

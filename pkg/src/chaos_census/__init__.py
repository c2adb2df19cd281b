"""Exact census of double-coverings and Rademacher chaos moments."""

__version__ = "0.1.0"

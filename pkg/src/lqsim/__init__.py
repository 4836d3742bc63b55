"""Logical-qubit circuit simulation, exact correlated decoding, and analysis."""

__version__ = "0.1.0"

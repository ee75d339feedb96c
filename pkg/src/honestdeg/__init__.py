"""Executable constructions in the honest elementary degrees and relative provability."""

__version__ = "0.1.0"

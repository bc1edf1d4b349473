"""Hilbert-style calculi for the weak Kleene logics PWK and BK."""

__version__ = "0.1.0"

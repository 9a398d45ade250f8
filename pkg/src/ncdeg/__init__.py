"""Noncommutative rank and degrees of Dieudonne subdeterminants."""

__version__ = "0.1.0"

"""Minimal dynamical systems: exact constructions and bounded-horizon verdicts."""

__version__ = "0.1.0"

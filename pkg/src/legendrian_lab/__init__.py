"""Numerical toolkit for Legendrian approximation of transverse curves in contact space."""

__version__ = "0.1.0"

"""Numerical infrared structure of classical electrodynamics."""
__version__ = "0.1.0"

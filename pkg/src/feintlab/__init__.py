"""Feint-aware strategy engine and combat simulator for two-player games."""

__version__ = "0.1.0"

"""Variability-aware GPU cluster scheduling: simulator and placement policies."""

__version__ = "0.1.0"

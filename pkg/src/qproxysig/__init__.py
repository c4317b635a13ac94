"""Simulator for two quantum proxy blind signature schemes over controlled teleportation."""

__version__ = "0.1.0"

"""Simulation and verification toolkit for the promised generalized inner product."""

__version__ = "0.1.0"

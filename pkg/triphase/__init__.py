"""Spectral simulator and verification harness of a three-phase heat system
with a massive interface."""

__version__ = '0.1.0'

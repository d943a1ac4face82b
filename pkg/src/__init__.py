"""Minimal relaxations of multi-view camera autocalibration."""

__version__ = "0.1.0"

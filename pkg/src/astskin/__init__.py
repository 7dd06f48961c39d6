"""Acoustic soft tactile skin calibration toolkit."""

__version__ = "0.1.0"

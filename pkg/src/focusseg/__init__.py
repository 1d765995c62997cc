"""Defocus-blur region detection from DCT sharpness maps and a pulse-coupled neural network."""

__version__ = "0.1.0"

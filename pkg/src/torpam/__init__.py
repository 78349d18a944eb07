"""Colored noise, heat kernels and the parabolic Anderson model on the flat torus."""

__version__ = "0.1.0"

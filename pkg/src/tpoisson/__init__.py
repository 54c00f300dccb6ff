"""Torus-invariant polynomial Poisson deformations of log-canonical structures."""

__version__ = "0.1.0"

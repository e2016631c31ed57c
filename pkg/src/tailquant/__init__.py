"""Asymptotic tail quantiles of Generalised Gamma-type distributions."""
__version__ = "0.1.0"

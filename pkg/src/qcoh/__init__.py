"""Exact quantum cohomology computations for minimal Fano threefolds and del Pezzo surfaces."""

__version__ = "0.1.0"

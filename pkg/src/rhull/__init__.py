"""Rasterized r-convex hulls, regularity and local-connectivity probes for planar sets."""

__version__ = "0.1.0"

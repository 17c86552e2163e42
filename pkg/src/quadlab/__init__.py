"""Rooted planar quadrangulations: blocks, allocations, samplers and metric tools."""

__version__ = "0.1.0"

"""Stabilizer-code workbench for a Z4 qudit code on the kagome lattice."""

__version__ = "0.1.0"

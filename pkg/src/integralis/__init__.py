"""Exact analysis of first integrals, last multipliers and partial integrals
for linear first-order PDE systems and total differential systems."""

__version__ = "0.1.0"

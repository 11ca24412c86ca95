"""Simulator for quantum key distribution with polarizing Mach-Zehnder interferometers."""

__version__ = "0.1.0"

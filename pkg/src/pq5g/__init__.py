"""Simulated quantum-safe UE-to-UE communication over a software 5G network."""

__version__ = "0.1.0"

"""Quantum trace of the LR punctured-torus intertwiner and its asymptotics."""

__version__ = "0.1.0"

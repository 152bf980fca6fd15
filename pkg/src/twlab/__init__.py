"""Simulation and verification tools for the stochastic ordering of Tracy-Widom(beta) laws."""

__version__ = "0.1.0"

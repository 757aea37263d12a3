"""Fitting-ontology solvers for the description logics ALC, ALCI, and ALCQ."""

__version__ = "0.1.0"

"""Approximation of real subspaces by rational subspaces: exact Plücker tools,
canonical angles, enumeration by height, explicit constructions and bounds."""

__version__ = "0.1.0"

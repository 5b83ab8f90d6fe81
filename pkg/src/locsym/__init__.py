"""Local domain symmetry detection and breaking for finite model expansion."""

__version__ = "0.1.0"

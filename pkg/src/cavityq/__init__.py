"""cavityq: quantum statistics of superposed two-mode coherent and subharmonic cavity light."""

__version__ = "0.1.0"

__all__ = ["__version__"]

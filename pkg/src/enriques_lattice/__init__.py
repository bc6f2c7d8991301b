"""Exact lattice toolkit for the 10A+6B+4C Enriques reflection-group model."""
from .model import build_model, load_model

__version__ = "0.1.0"

__all__ = ["build_model", "load_model", "__version__"]

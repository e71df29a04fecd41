"""Indices of principal-direction line fields at isolated umbilics."""

from .errors import UmbilixError
from .fieldindex import HalfIndex, LoopSpec

__version__ = "0.1.0"
__all__ = ["HalfIndex", "LoopSpec", "UmbilixError", "__version__"]

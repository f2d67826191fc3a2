"""Coherent-state quantization of a particle confined to an interval or half-line."""

from .errors import (ConfigError, CoverageError, DivergenceError, DomainError, FuzzyboxError,
                     NumericalError, ResolutionError)
from .grid import Grid, WaveFunction
from .windowfn import Geometry, QuantizationParams, erfc, window_B, window_dB

__all__ = [
    "ConfigError", "CoverageError", "DivergenceError", "DomainError", "FuzzyboxError", "NumericalError",
    "ResolutionError", "Grid", "WaveFunction", "Geometry", "QuantizationParams", "erfc", "window_B", "window_dB",
]

__version__ = "0.1.0"

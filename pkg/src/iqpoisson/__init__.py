"""Exact computations in quantum symmetric pairs and their Poisson limits."""
from .scalarfield import GaussianRational, Scalar, V, specialize_at_one
from .rootdata import CartanData, DiagramError, SatakeDiagram, PRESETS, family, preset, resolve_diagram

__version__ = "0.1.0"

__all__ = [
    "GaussianRational", "Scalar", "V", "specialize_at_one",
    "CartanData", "DiagramError", "SatakeDiagram", "PRESETS", "family", "preset", "resolve_diagram",
    "__version__",
]

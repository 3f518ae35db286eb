"""Sub-wavelength resonances of nested high-contrast elastic disk resonators."""

from .assembly import ConcentricGeometry, IncidentWave
from .errors import (
    ArtifactError,
    ConfigError,
    ConvergenceError,
    DomainError,
    GeometryError,
    NearSingularError,
    SingularityError,
)
from .medium import Contrast, Medium

__version__ = "0.1.0"

__all__ = [
    "ArtifactError",
    "ConcentricGeometry",
    "ConfigError",
    "Contrast",
    "ConvergenceError",
    "DomainError",
    "GeometryError",
    "IncidentWave",
    "Medium",
    "NearSingularError",
    "SingularityError",
]

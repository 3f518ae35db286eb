"""Exception hierarchy shared by all modules."""


class ArtifactError(Exception):
    """Base class for library errors."""


class DomainError(ArtifactError, ValueError):
    """Argument outside the supported range of an operation."""


class SingularityError(ArtifactError, ValueError):
    """Evaluation at a singular point (zero argument, coincident points)."""


class GeometryError(ArtifactError, ValueError):
    """Invalid radii or a geometry/channel mismatch."""


class NearSingularError(ArtifactError, ArithmeticError):
    """Linear system too ill-conditioned to solve reliably."""

    def __init__(self, message: str, condition: float):
        super().__init__(message)
        self.condition = condition


class ConvergenceError(ArtifactError, ArithmeticError):
    """Iterative root finder diverged or left its window."""


class ConfigError(ArtifactError, ValueError):
    """Malformed run configuration."""

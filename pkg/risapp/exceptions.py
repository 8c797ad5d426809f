class RisError(Exception):
    """Base de todos los errores del paquete."""


class DimensionError(RisError):
    pass


class NonFiniteError(RisError):
    pass


class NotSkewHermitianError(RisError):
    pass


class NotUnitaryError(RisError):
    pass


class SingularMatrixError(RisError):
    pass


class EigenSolverError(RisError):
    pass


class DegenerateSceneError(RisError):
    """El canal efectivo es (numéricamente) nulo: ||h||^2 <= eps_channel."""


class ScenarioError(RisError):
    pass


class GeometryError(ScenarioError):
    pass


class ArchitectureError(RisError):
    pass


class StepRangeError(RisError):
    pass


class GridError(RisError):
    pass


class ConfigError(RisError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"línea {line}: {message}"
        super().__init__(message)

"""Exception types shared across the package."""


class CocloError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(CocloError):
    """A model, gait, terrain, or filter configuration is invalid or inconsistent."""


class OrderingError(CocloError):
    """Sensor frames arrived with non-increasing timestamps."""


class SchemaError(CocloError):
    """A log or config file does not match the documented schema."""


class KinematicSingularityError(CocloError):
    """A leg Jacobian is singular (or near-singular) where an inverse is required."""


class InsufficientSupportError(CocloError):
    """Too few (or degenerate) stance legs to solve for the body twist."""


class NumericalError(CocloError):
    """A square-root filter operation lost positive definiteness beyond recovery."""

class GeometryError(ValueError):
    """Base class for invalid vehicle/window geometry."""


class DegenerateGeometryError(GeometryError):
    """Vehicle is within R_MIN of a window vertex."""


class RangeViolationError(GeometryError):
    """A bearing left its admissible range (vehicle past the window plane)."""


class SingularGeometryError(GeometryError):
    """Azimuth rate undefined because the vertex is straight above or below."""


class DomainError(ValueError):
    """Angle argument outside the domain of a shaping function."""


class GimbalSingularityError(ValueError):
    """Euler-rate map evaluated at pitch = +-pi/2."""


class InvalidScenarioError(ValueError):
    """Initial condition with no consistent approach-side position."""


class ConfigError(ValueError):
    """Scenario configuration could not be parsed or validated."""

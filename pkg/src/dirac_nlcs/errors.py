class NumericalError(RuntimeError):
    """A series, quadrature or root search failed to converge."""


class ConfigError(ValueError):
    """Invalid run configuration."""

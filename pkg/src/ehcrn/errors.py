"""Exception types shared across the package."""


class ConfigError(Exception):
    """A configuration file or CLI argument is missing, malformed or invalid."""


class NumericsError(RuntimeError):
    """A numeric routine failed (singular system, residual out of bounds)."""

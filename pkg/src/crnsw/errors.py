class ParameterError(ValueError):
    """Raised when model parameters violate their stated invariants."""


class ConfigError(ValueError):
    """Raised for invalid experiment configuration."""

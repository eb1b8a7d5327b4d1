class ConfigError(ValueError):
    """Invalid model, test or study configuration."""


class DataError(ValueError):
    """Malformed or inconsistent input data."""


class SimulationError(RuntimeError):
    """A simulator could not produce a pattern (e.g. infeasible packing)."""

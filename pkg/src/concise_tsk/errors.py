class ConfigError(ValueError):
    """Invalid configuration or hyperparameter."""


class DataError(ValueError):
    """Malformed input data (bad CSV row, dimension mismatch, ...)."""


class ModelFormatError(ValueError):
    """Unreadable or unsupported serialized model."""


class NumericalError(ArithmeticError):
    """Non-finite values produced during an iterative solve."""

"""Shared exception types."""


class ConfigError(ValueError):
    """Raised when configuration inputs are missing, malformed or inconsistent."""


class CalibrationError(RuntimeError):
    """Raised when a calibration root search cannot bracket or reach its target residual."""

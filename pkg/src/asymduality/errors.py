"""Exception types shared across the package."""


class AsymDualityError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(AsymDualityError, ValueError):
    """An input violates its contract. ``field`` names the offender when known."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class ZeroProbabilityBranchError(ValidationError):
    """Conditioning on a measurement outcome that occurs with probability zero."""


class ConsistencyError(AsymDualityError, RuntimeError):
    """Two independent internal routes disagree; indicates a coefficient bug."""

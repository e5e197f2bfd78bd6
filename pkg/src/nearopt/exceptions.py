class NearOptError(Exception):
    """Base class for errors raised by nearopt."""


class ValidationError(NearOptError, ValueError):
    """Invalid design, state, sample or configuration."""


class UnsupportedDesign(ValidationError):
    """The requested computation is not supported for this design."""


class BudgetExceeded(NearOptError, RuntimeError):
    """A computation would exceed its configured resource budget."""

class WordMismatchError(ValueError):
    """Two operands do not share the colored words an operation needs."""


class PreconditionError(ValueError):
    """An operation was called outside of its domain of definition."""


class BudgetExceededError(ValueError):
    """A memory or enumeration budget from the run configuration was hit."""


class ExactnessError(ValueError):
    """An exact computation needs numbers outside the supported exact fields."""

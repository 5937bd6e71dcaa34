class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class CapacityError(ValueError):
    """A request exceeds a configured size ceiling."""


class UndefinedEstimateError(ValueError):
    """An estimate has no admissible trials to average over."""

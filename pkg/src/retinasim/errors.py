"""Exception types raised by the simulator."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class DegenerateGeometryError(DomainError):
    """Viewing rays are (numerically) parallel, so depth is unbounded."""


class NoSignalError(DomainError):
    """Every detector response is zero; there is nothing to localize."""

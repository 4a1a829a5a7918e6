"""Exception types raised by the library."""


class DomainError(ValueError):
    """An input lies outside the parameter region a formula covers."""


class DegenerateStateError(ValueError):
    """No meaningful maximizing angle set exists for the state."""


class NoCrossingError(ValueError):
    """B_max never rises above the classical bound, so no threshold exists."""


class ResolutionError(ValueError):
    """A time grid is too coarse to resolve the memory-kernel oscillations."""


class NumericalError(ArithmeticError):
    """A numerical routine produced an inconsistent or non-finite result."""

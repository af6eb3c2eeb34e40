"""Exceptions shared across modules."""


class DomainError(ValueError):
    """Argument outside the range where a formula is defined."""


class DivergenceError(ArithmeticError):
    """Quantity is infinite at the requested point."""

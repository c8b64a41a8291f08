"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConstructionError(ValueError):
    """A value object received fields violating its invariants."""


class ResourceLimitError(RuntimeError):
    """A requested computation exceeds a configured size cap."""


class DegenerateRatioError(ArithmeticError):
    """A threshold ratio has a vanishing denominator."""


class SingularAngleError(ArithmeticError):
    """A closed form was requested at angles where that form is singular."""

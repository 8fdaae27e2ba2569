"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An input is outside its allowed range or has the wrong shape."""


class NumericalFailure(ArithmeticError):
    """A computation hit an unphysical state or a failed numerical precondition."""

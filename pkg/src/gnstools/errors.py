"""Exception types shared across the toolkit."""


class ShapeMismatchError(ValueError):
    """Operands live on different block structures."""


class NotFaithfulError(ValueError):
    """A density element has an eigenvalue at or below the positivity floor."""


class InvalidDensityError(ValueError):
    """An operator fails the positivity / unit-trace checks for a density."""


class InvalidGaugeError(ValueError):
    """A gauge element is not unitary within tolerance."""


class InvalidChannelError(ValueError):
    """A Kraus family is not trace preserving within tolerance."""


class NumericalError(RuntimeError):
    """An internal numerical contract broke (singular operator, bad residual)."""

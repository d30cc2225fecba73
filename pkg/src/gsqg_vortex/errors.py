"""Exception types shared across the package."""


class SingularityError(ValueError):
    """Green function requested at zero separation."""


class ResolutionError(ValueError):
    """Grid too coarse to resolve the scaled support."""


class InfeasibleConstraintError(RuntimeError):
    """Momentum target cannot be bracketed by the multiplier search."""


class InfeasibleConfigError(ValueError):
    """Requested core size does not fit in the admissible region."""

    def __init__(self, message, eps_max=None):
        super().__init__(message)
        self.eps_max = eps_max


class UnsupportedError(ValueError):
    """Operation not defined for the requested exponent."""


class NotConvergedError(RuntimeError):
    """Multiplier extraction requested on an unconverged result."""

"""Exception types raised by the precoding and simulation code."""


class ConditioningError(ArithmeticError):
    """A matrix needed by the design is numerically rank deficient.

    Attributes
    ----------
    ratio : float
        Smallest over largest singular value that triggered the error.
    tol : float
        Relative tolerance the ratio was compared against.
    """

    def __init__(self, message, ratio=float("nan"), tol=float("nan")):
        super().__init__(f"{message} (sigma_min/sigma_max={ratio:.3e}, tol={tol:.1e})")
        self.ratio = ratio
        self.tol = tol


class InfeasibleDesignError(RuntimeError):
    """The first iterate of the constrained design already violates alpha0."""

    def __init__(self, alpha, alpha0):
        super().__init__(
            f"initial precoder has condition number {alpha:.6g} > alpha0={alpha0:.6g}; "
            "no feasible iterate exists")
        self.alpha = alpha
        self.alpha0 = alpha0


class EqualizerFailure(ArithmeticError):
    """Zero-forcing equalization failed because Q = H P is rank deficient.

    Attributes
    ----------
    indices : tuple of int
        Positions (within the batch) of the symbols that could not be equalized.
    """

    def __init__(self, indices):
        self.indices = tuple(int(i) for i in indices)
        super().__init__(f"transition matrix rank deficient for symbols {self.indices[:8]}")


class ConfigError(ValueError):
    """An experiment configuration is invalid; the message carries the field path."""

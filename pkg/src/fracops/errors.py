"""Shared exception and warning types."""


class SingularityError(ValueError):
    """Evaluation requested at a singular point of a kernel or field."""


class UnsupportedDensityError(ValueError):
    """Kernel variant has no pointwise density (purely atomic measure)."""


class NonIntegrableTailError(ValueError):
    """Field grows too fast at infinity for the operator to be defined."""


class NumericalError(RuntimeError):
    """A quadrature or solver failed to reach its accuracy target."""

    def __init__(self, msg: str, err_est: float | None = None):
        super().__init__(msg)
        self.err_est = err_est


class NonConvergenceError(NumericalError):
    """Iterative solver hit its iteration cap before converging."""


class AccuracyWarning(UserWarning):
    """Result returned, but the requested accuracy was not certified."""

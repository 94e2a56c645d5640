"""Exception types raised across the package."""


class ParameterError(ValueError):
    """An argument is outside the domain an operation accepts."""


class CalibrationError(RuntimeError):
    """Empirical calibration could not bracket a noise scale."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class NumericError(ArithmeticError):
    """A quadrature or other numerical routine failed to reach its tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})

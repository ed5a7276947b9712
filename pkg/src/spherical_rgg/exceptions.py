class DomainError(ValueError):
    """An argument lies outside the region where a formula is valid."""


class ContourError(RuntimeError):
    """The steepest-descent contour violated one of its analytic bounds.

    Attributes
    ----------
    x : float or None
        Abscissa at which the violation was detected.
    """

    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class DiagnosticError(RuntimeError):
    """A Monte Carlo engine produced diagnostics outside tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}

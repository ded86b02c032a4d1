"""Exception hierarchy shared by all modules."""


class Lambda2pError(Exception):
    """Base class for all package errors."""


class ConfigError(Lambda2pError, ValueError):
    """Invalid parameter values or malformed run configuration."""


class UnsupportedConfigurationError(ConfigError):
    """Configuration outside the domain of a closed-form evaluator
    (e.g. detuned photons on a resonant-only path)."""


class NumericalError(Lambda2pError):
    """Base class for runtime numerical failures."""


class QuadratureError(NumericalError):
    """Quadrature failed to reach the requested tolerance.

    Carries the partial result and the tolerance actually achieved.
    """

    def __init__(self, message, partial=None, achieved_tol=None):
        super().__init__(message)
        self.partial = partial
        self.achieved_tol = achieved_tol


class ConvergenceError(NumericalError):
    """An iterative limit (e.g. the t -> infinity horizon sequence)
    failed to converge within its iteration budget."""


class GridCaptureError(NumericalError):
    """The oracle mode grid is too narrow to hold the initial pulse.

    ``captured`` is the fraction of the pulse norm representable on
    the grid before renormalization.
    """

    def __init__(self, message, captured):
        super().__init__(message)
        self.captured = captured

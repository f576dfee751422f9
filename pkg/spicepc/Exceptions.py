"""Exceptions raised by spicepc."""


class SpiceError(Exception):
    """Base class for all spicepc errors."""


class DimensionError(SpiceError, ValueError):
    """Array shapes do not agree with the problem or with each other."""


class FactorizationError(SpiceError, ArithmeticError):
    """Cholesky factorization met a non-positive pivot."""


class DegenerateProblemError(SpiceError, ArithmeticError):
    """The constraint Jacobian vanishes, so R(x) = 0 and r_k is undefined."""


class DivergenceError(SpiceError, FloatingPointError):
    """An iterate or objective value became non-finite."""


class InfeasibleProblemError(SpiceError, RuntimeError):
    """No feasible point was found by the reference oracle."""


class EtaSearchError(SpiceError, RuntimeError):
    """The eta escalation loop ran out of passes.

    The last trial state is kept on the exception so the caller can report
    how far the search got.
    """
    def __init__(self, message, eta, r, required, passes, predictor=None):
        super().__init__(message)
        self.eta = eta
        self.r = r
        self.required = required
        self.passes = passes
        self.predictor = predictor

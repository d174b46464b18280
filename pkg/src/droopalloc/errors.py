"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class DroopAllocError(Exception):
    """Base class for all library errors."""


class InvalidArgumentError(DroopAllocError, ValueError):
    pass


class FrameError(DroopAllocError):
    """A phasor was passed in the wrong reference frame."""


class CaseValidationError(DroopAllocError, ValueError):
    """A case document or NetworkCase violates the schema.

    ``path`` is the dotted location of the offending entry.
    """

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class RankDeficiencyError(DroopAllocError):
    def __init__(self, message, equations=()):
        self.equations = list(equations)
        super().__init__(message)


class NonConvergenceError(DroopAllocError):
    def __init__(self, message, best_residual=float("nan"), best=None):
        self.best_residual = best_residual
        self.best = best
        super().__init__(message)


class SingularAlgebraicError(DroopAllocError):
    """The algebraic Jacobian is singular: the equilibrium is not regular."""


class InstabilityError(DroopAllocError):
    def __init__(self, message, eigenvalues=()):
        self.eigenvalues = list(eigenvalues)
        super().__init__(message)


class SeedInstabilityError(InstabilityError):
    """The nominal gains do not give a stable starting equilibrium."""


class InfeasibleError(DroopAllocError):
    def __init__(self, message, abscissae=()):
        self.abscissae = list(abscissae)
        super().__init__(message)


class IntegrationError(DroopAllocError):
    def __init__(self, message, last_time=float("nan")):
        self.last_time = last_time
        super().__init__(message)


class DerivativeError(DroopAllocError):
    pass

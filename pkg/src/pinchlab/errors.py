"""Exception types shared across pinchlab.

Each error carries a module-qualified message (``"mesh: ..."``) so the
command-line layer can map it onto an exit code without parsing text.
"""


class PinchLabError(Exception):
    """Base class for every error raised by the package."""

    exit_code = 3


class DomainError(PinchLabError, ValueError):
    """A parameter lies outside the range where the construction makes sense."""

    exit_code = 2


class PreconditionError(PinchLabError, ValueError):
    """Inputs are valid on their own but violate an operation's hypothesis."""

    exit_code = 2


class MeshError(PinchLabError, ValueError):
    """A mesh (generated or read from disk) fails the immersed-mesh invariants."""

    exit_code = 4


class AssemblyError(PinchLabError, ArithmeticError):
    """Operator assembly hit a degenerate triangle."""


class EigenSolveError(PinchLabError, ArithmeticError):
    """The eigensolver did not reach the requested residual."""

    def __init__(self, message, best_ritz=None, residual=None):
        super().__init__(message)
        self.best_ritz = best_ritz
        self.residual = residual


class ConvergenceError(PinchLabError, ArithmeticError):
    """An iteration ran out of steps; the last iterate is attached."""

    def __init__(self, message, last_iterate=None, residual=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual

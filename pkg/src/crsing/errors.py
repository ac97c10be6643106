"""Exception hierarchy.

Every error carries a short machine-readable ``code``.  The CLI maps the
three families below onto its exit codes.
"""


class CRSingError(Exception):
    code = "error"

    def __init__(self, message="", code=None):
        super().__init__(message)
        if code is not None:
            self.code = code


# -- input errors (exit 1) ------------------------------------------------

class InputError(CRSingError):
    code = "input-error"


class ContextError(InputError):
    code = "context-error"


class ParseError(InputError):
    """Syntax or semantic error in an expression, with a 1-based position."""

    code = "syntax-error"

    def __init__(self, message, line=1, col=1, code=None):
        self.line = line
        self.col = col
        self.message = message
        super().__init__(f"{line}:{col}: {message}", code=code)


class ProblemError(InputError):
    code = "problem-error"

    def __init__(self, message, code=None, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, code=code)


# -- precondition / hypothesis errors (exit 2) -----------------------------

class PreconditionError(CRSingError):
    code = "precondition"


class UndefinedInputError(PreconditionError):
    code = "undefined-input"


class DimensionError(PreconditionError):
    code = "dimension"


class DomainError(PreconditionError):
    code = "domain"


class OffManifoldError(PreconditionError):
    code = "off-manifold"


class DegeneratePointError(PreconditionError):
    code = "degenerate-point"


class NotASubmanifoldError(PreconditionError):
    code = "not-a-submanifold"


class DegenerateMapError(PreconditionError):
    code = "degenerate-map"


class HypothesisError(PreconditionError):
    code = "hypothesis"


# -- search / experiment failures (exit 3) ---------------------------------

class InconclusiveError(CRSingError):
    code = "inconclusive"


class NotFound(InconclusiveError):
    code = "not-found"

    def __init__(self, message, attempts=0, log=()):
        self.attempts = attempts
        self.log = list(log)
        super().__init__(message)


class DivergedError(InconclusiveError):
    code = "diverged"

    def __init__(self, message, residuals=()):
        self.residuals = list(residuals)
        super().__init__(message)


class BoundaryZero(InconclusiveError):
    """A function vanishes at a boundary node of a disc (so on the manifold)."""

    code = "boundary-zero"

    def __init__(self, node, value=0.0):
        self.node = node
        self.value = value
        super().__init__(f"zero on the boundary circle at node {node} (|value| = {value:.3g})")

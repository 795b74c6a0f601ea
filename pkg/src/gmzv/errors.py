"""Exception hierarchy shared by every module of the package."""


class GmzvError(Exception):
    """Base class for all package errors."""


class GraphValidationError(GmzvError, ValueError):
    """A graph description violates one of the structural invariants."""


class LoopEdge(GraphValidationError):
    pass


class Disconnected(GraphValidationError):
    pass


class BoundaryMissingExternal(GraphValidationError):
    pass


class NonPositiveSubdivision(GraphValidationError):
    pass


class InconsistentSigns(GraphValidationError):
    pass


class PreconditionError(GmzvError):
    """Input is valid but outside the domain of the requested operation."""


class NotATree(PreconditionError):
    pass


class SignNormalizationFailed(PreconditionError):
    pass


class OverlappingSupports(PreconditionError):
    pass


class NotReducible(PreconditionError):
    pass


class SignInfeasible(PreconditionError):
    """The sign constraints admit no all-nonzero labelling; the sum is empty."""


class ConvergenceError(GmzvError):
    pass


class ConvergenceGuardFailed(ConvergenceError):
    pass


class DivergentIndex(ConvergenceError):
    pass


class DivergentTerm(ConvergenceError):
    pass


class GammaPole(ConvergenceError):
    pass


class QuadratureNonConvergent(ConvergenceError):
    pass

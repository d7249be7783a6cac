"""Exception hierarchy shared by every module."""


class FairAccessError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(FairAccessError, ValueError):
    """A graph or group file contains a malformed line."""


class ValidationError(FairAccessError, ValueError):
    """Input parsed fine but violates a structural requirement."""


class InvalidPair(FairAccessError, ValueError):
    """A node pair with identical endpoints (or out-of-range ids)."""


class EdgeExists(FairAccessError, ValueError):
    """Attempted to add an edge that is already present."""


class EmptyGroup(FairAccessError, ValueError):
    pass


class SingularMatrix(FairAccessError, ArithmeticError):
    """The shifted Laplacian could not be factorized (graph not connected)."""


class GraphTooLarge(FairAccessError, ValueError):
    pass


class BudgetTooLarge(FairAccessError, ValueError):
    pass


class CombinatorialBlowup(FairAccessError, ValueError):
    pass


class NoConvergence(FairAccessError, ArithmeticError):
    pass


class DegenerateInput(FairAccessError, ValueError):
    pass


class NoNonEdge(FairAccessError, ValueError):
    pass


class InsufficientCandidates(FairAccessError, ValueError):
    pass

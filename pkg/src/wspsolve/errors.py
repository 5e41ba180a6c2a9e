"""Exception hierarchy shared by every wspsolve module."""


class WSPError(Exception):
    """Base class for all wspsolve errors."""


class DisjointnessViolation(WSPError):
    """Two plans share a task or a user where disjointness is required."""


class ScopeMismatch(WSPError):
    """An assignment handed to a constraint does not cover exactly its scope."""


class OverlapError(WSPError):
    """A family of task subsets passed to ``vect`` is not pairwise disjoint."""


class IncomparableKinds(WSPError):
    """Patterns of different kinds or different cells were compared."""


class RelationMismatch(WSPError):
    """The chosen indistinguishability relation does not cover the constraint set."""


class ResourceLimit(WSPError):
    """A configured plan or enumeration budget was exceeded."""


class BudgetExceeded(ResourceLimit):
    """The brute-force oracle would need more assignments than allowed."""


class SchemaError(WSPError, ValueError):
    """A workflow schema or constraint is structurally invalid."""


class ParseError(WSPError):
    """An instance or plan document is not well-formed JSON."""


class ValidationError(WSPError):
    """A document parsed but refers to unknown names or carries bad parameters."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path

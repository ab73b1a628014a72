"""Exception hierarchy shared by every module of the package."""


class SpaceRevError(Exception):
    """Base class for all errors raised by spacerev."""


class UnknownVertex(SpaceRevError, KeyError):
    pass


class InvalidRadii(SpaceRevError, ValueError):
    pass


class BadIndex(SpaceRevError, IndexError):
    pass


class ParseError(SpaceRevError, ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class IngestError(SpaceRevError, ValueError):
    """Malformed clause or knowledge base (tautology, empty clause, bad anchor)."""


class BudgetExceeded(SpaceRevError):
    """Conflict enumeration hit its configured bound; results would be incomplete."""


class DisconnectedFootprint(SpaceRevError, ValueError):
    pass


class IndependenceViolated(SpaceRevError, ValueError):
    pass


class EmptyCandidates(SpaceRevError, ValueError):
    pass


class UnrepairableConflict(SpaceRevError):
    """A conflict cannot be repaired without removing protected clauses."""

    def __init__(self, message: str, conflicts=()):
        self.conflicts = tuple(conflicts)
        super().__init__(message)


class InvalidScenario(SpaceRevError, ValueError):
    pass


class InvalidParams(SpaceRevError, ValueError):
    pass

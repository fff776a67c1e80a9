"""Exception hierarchy shared across the package.

Two families matter to callers: ``InputError`` covers unreadable or
malformed files, ``DomainError`` covers well-formed input that the engine
refuses (conflicts, capacity, unknown identifiers). The CLI maps them to
exit codes 1 and 2 respectively.
"""


class ConductorError(Exception):
    """Base class for all package-specific errors."""


class InputError(ConductorError):
    """A file or payload could not be read or parsed."""


class ParseError(InputError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DomainError(ConductorError):
    """Valid input that the engine rejects on semantic grounds."""


class UnknownQuestion(DomainError):
    pass


class PhaseMismatch(DomainError):
    pass


class MissingPolarity(DomainError):
    pass


class UnknownNode(DomainError):
    pass


class DuplicateEvent(DomainError):
    pass


class EmptyCaseId(DomainError):
    pass


class MissingCaseId(DomainError):
    pass


class DegenerateLog(DomainError):
    pass


class UnresolvedConflict(DomainError):
    def __init__(self, message: str, phases=(), hints=()):
        super().__init__(message)
        self.phases = tuple(phases)
        self.hints = tuple(hints)


class InsufficientCapacity(DomainError):
    def __init__(self, message: str, hints=()):
        super().__init__(message)
        self.hints = tuple(hints)


class PlanTopologyMismatch(DomainError):
    pass


class SeedMismatch(DomainError):
    pass

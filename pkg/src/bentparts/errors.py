"""Exception hierarchy shared across the package."""


class BentPartsError(Exception):
    """Base class for all package errors."""


class DomainError(BentPartsError):
    """An argument violates a documented precondition."""


class ParseError(BentPartsError):
    """A file or serialized object could not be decoded."""


class RouteRefusedError(BentPartsError):
    """A verification route is unavailable at this instance size/budget."""


class ConstructionRefusedError(BentPartsError):
    """A construction precondition failed; `condition` names which one."""

    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        super().__init__(f"{condition}" + (f": {detail}" if detail else ""))


class BudgetExceededError(BentPartsError):
    """A bounded search ran out of nodes; carries a resume token."""

    def __init__(self, message: str, resume_token: bytes):
        self.resume_token = resume_token
        super().__init__(message)


class InvariantViolationError(BentPartsError):
    """An internal exact identity failed; indicates a bug, not bad input."""

class PlanningError(Exception):
    """Base class for every error raised by macroplan."""


class NotApplicable(PlanningError):
    pass


class UnknownStep(PlanningError):
    pass


class ClassViolation(PlanningError):
    """The problem is outside the class a planner requires."""


class CyclicGraphError(ClassViolation):
    pass


class NoPlan(PlanningError):
    """The planner finished without producing a plan."""


class ResourceLimit(PlanningError):
    pass


class LimitExceeded(ResourceLimit):
    def __init__(self, length, limit):
        super().__init__(f"plan expands to {length} actions, limit is {limit}")
        self.length = length
        self.limit = limit


class StateCapExceeded(ResourceLimit):
    def __init__(self, cap):
        super().__init__(f"more than {cap} states reachable")
        self.cap = cap


class MacroError(PlanningError):
    """A macro failed the well-definedness or acyclicity check."""


class MemoKeyViolation(AssertionError):
    """Raised when a reversible-solve call sees a non-initial value outside W."""


class ParseError(PlanningError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DomainViolation(ParseError):
    pass


class MissingInit(ParseError):
    pass

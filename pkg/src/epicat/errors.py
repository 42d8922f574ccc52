class EpicatError(Exception):
    """Base class for all errors raised by epicat."""


class ContractError(EpicatError, ValueError):
    """An argument violates an operation's precondition (dimensions, ranges)."""


class EnumerationLimitError(EpicatError):
    def __init__(self, message: str, bound: int):
        super().__init__(message)
        self.bound = bound


class IncompatibleRelationError(EpicatError):
    """A relation that must be I-compatible is not."""


class UnknownNameError(EpicatError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class NotAConceptError(EpicatError, ValueError):
    pass


class ParseError(EpicatError):
    """Syntax error in formula, sequent or file input.

    ``position`` is a 0-based character offset for formula text, or a
    1-based line number for file formats (see ``line``).
    """

    def __init__(self, message: str, position: int | None = None, line: int | None = None):
        self.message = message
        self.position = position
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if position is not None:
            where.append(f"position {position}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class DialectError(ParseError):
    """A construct is not admitted by the selected language dialect."""


class SearchBoundError(EpicatError):
    def __init__(self, message: str, estimate: int):
        super().__init__(message)
        self.estimate = estimate
